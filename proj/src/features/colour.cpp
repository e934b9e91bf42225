#include <algorithm>
#include <array>
#include <cmath>

#include "dvr/features.hpp"

namespace dvr::features {

namespace {

const std::array<double, 256>& srgb_to_linear() {
  static const std::array<double, 256> lut = [] {
    std::array<double, 256> t;
    for (int i = 0; i < 256; ++i) {
      const double c = i / 255.0;
      t[i] = c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
    }
    return t;
  }();
  return lut;
}

double lab_f(double t) {
  constexpr double delta = 6.0 / 29.0;
  return t > delta * delta * delta ? std::cbrt(t) : t / (3.0 * delta * delta) + 4.0 / 29.0;
}

constexpr int kPatchRows = (kFrameHeight - kPatchHeight) / kPatchStrideY + 1;
constexpr int kPatchCols = (kFrameWidth - kPatchWidth) / kPatchStrideX + 1;
constexpr int kColourLength = kPatchRows * kPatchCols * kColourChannels;

}  // namespace

PixelColour convert_pixel(std::uint8_t r8, std::uint8_t g8, std::uint8_t b8) {
  PixelColour out{};

  const int mx = std::max({r8, g8, b8});
  const int mn = std::min({r8, g8, b8});
  out.v = mx / 255.0;
  out.s = mx == 0 ? 0.0 : static_cast<double>(mx - mn) / mx;
  if (mx != mn) {
    const double d = mx - mn;
    double h;
    if (mx == r8)
      h = 60.0 * ((g8 - b8) / d);
    else if (mx == g8)
      h = 60.0 * ((b8 - r8) / d + 2.0);
    else
      h = 60.0 * ((r8 - g8) / d + 4.0);
    out.h = h < 0.0 ? h + 360.0 : h;
  }

  const auto& lin = srgb_to_linear();
  const double r = lin[r8], g = lin[g8], b = lin[b8];
  const double x = (0.4124564 * r + 0.3575761 * g + 0.1804375 * b) / 0.95047;
  const double y = 0.2126729 * r + 0.7151522 * g + 0.0721750 * b;
  const double z = (0.0193339 * r + 0.1191920 * g + 0.9503041 * b) / 1.08883;
  const double fx = lab_f(x), fy = lab_f(y), fz = lab_f(z);
  out.l = 116.0 * fy - 16.0;
  out.a = 500.0 * (fx - fy);
  out.b = 200.0 * (fy - fz);
  return out;
}

double order_invariant_mean(std::span<double> samples) {
  if (samples.empty()) return 0.0;
  std::sort(samples.begin(), samples.end());
  const double anchor = samples.front();
  double excess = 0.0;
  for (double s : samples) excess += s - anchor;
  return anchor + excess / static_cast<double>(samples.size());
}

Eigen::VectorXd frame_colour_vector(const Frame& frame) {
  if (!frame.is_normalized()) throw Error(ErrorKind::ShapeError, "colour features need 128x64 frames");

  // Rescaled channel planes.
  const std::size_t n = static_cast<std::size_t>(kFrameHeight) * kFrameWidth;
  std::array<std::vector<double>, kColourChannels> planes;
  for (auto& p : planes) p.resize(n);
  for (int y = 0; y < kFrameHeight; ++y)
    for (int x = 0; x < kFrameWidth; ++x) {
      const PixelColour c = convert_pixel(frame.at(y, x, 0), frame.at(y, x, 1), frame.at(y, x, 2));
      const std::array<double, kColourChannels> scaled{
          c.h / 360.0, c.s, c.v, c.l / 100.0, (c.a + 128.0) / 255.0, (c.b + 128.0) / 255.0};
      const std::size_t i = static_cast<std::size_t>(y) * kFrameWidth + x;
      for (int k = 0; k < kColourChannels; ++k) planes[k][i] = std::clamp(scaled[k], 0.0, 1.0);
    }

  Eigen::VectorXd out(kColourLength);
  Eigen::Index o = 0;
  constexpr double patch_area = kPatchHeight * kPatchWidth;
  for (int py = 0; py < kPatchRows; ++py)
    for (int px = 0; px < kPatchCols; ++px) {
      const int y0 = py * kPatchStrideY;
      const int x0 = px * kPatchStrideX;
      for (int k = 0; k < kColourChannels; ++k) {
        const auto& plane = planes[k];
        const double anchor = plane[static_cast<std::size_t>(y0) * kFrameWidth + x0];
        double excess = 0.0;
        for (int y = y0; y < y0 + kPatchHeight; ++y)
          for (int x = x0; x < x0 + kPatchWidth; ++x) excess += plane[static_cast<std::size_t>(y) * kFrameWidth + x] - anchor;
        out[o++] = anchor + excess / patch_area;
      }
    }
  return out;
}

Eigen::VectorXd colour_descriptor(const motion::Fragment& fragment) {
  if (fragment.frames.empty()) throw Error(ErrorKind::ShapeError, "empty fragment");
  std::vector<Eigen::VectorXd> per_frame;
  per_frame.reserve(fragment.frames.size());
  for (const Frame& f : fragment.frames) per_frame.push_back(frame_colour_vector(f));
  std::vector<const Eigen::VectorXd*> refs;
  for (const auto& v : per_frame) refs.push_back(&v);
  return temporal_colour_mean(refs);
}

Eigen::VectorXd temporal_colour_mean(std::span<const Eigen::VectorXd* const> per_frame) {
  if (per_frame.empty()) throw Error(ErrorKind::ShapeError, "empty fragment");
  Eigen::VectorXd out(kColourLength);
  std::vector<double> samples(per_frame.size());
  for (Eigen::Index i = 0; i < kColourLength; ++i) {
    for (std::size_t t = 0; t < per_frame.size(); ++t) samples[t] = (*per_frame[t])[i];
    out[i] = order_invariant_mean(samples);
  }
  return out;
}

}  // namespace dvr::features
