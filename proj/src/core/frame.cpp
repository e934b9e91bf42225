#include <algorithm>
#include <cmath>

#include "dvr/core.hpp"

namespace dvr {

namespace {

struct Tap {
  int lo;
  int hi;
  double frac;
};

// Pixel-centre aligned source coordinates for one output axis.
std::vector<Tap> bilinear_taps(int in_size, int out_size) {
  std::vector<Tap> taps(out_size);
  const double scale = static_cast<double>(in_size) / out_size;
  for (int i = 0; i < out_size; ++i) {
    double s = (i + 0.5) * scale - 0.5;
    s = std::clamp(s, 0.0, static_cast<double>(in_size - 1));
    const int lo = static_cast<int>(std::floor(s));
    taps[i] = {lo, std::min(lo + 1, in_size - 1), s - lo};
  }
  return taps;
}

}  // namespace

Frame resize_bilinear(const Frame& frame, int height, int width) {
  if (frame.empty() || frame.rgb.size() != static_cast<std::size_t>(frame.height) * frame.width * 3)
    throw Error(ErrorKind::CorruptFrame, "zero-area or inconsistent frame");
  if (height <= 0 || width <= 0) throw Error(ErrorKind::ShapeError, "zero-area target size");

  Frame out(height, width, frame.index);
  const auto rows = bilinear_taps(frame.height, height);
  const auto cols = bilinear_taps(frame.width, width);
  for (int y = 0; y < height; ++y) {
    const Tap& ty = rows[y];
    for (int x = 0; x < width; ++x) {
      const Tap& tx = cols[x];
      for (int c = 0; c < 3; ++c) {
        const double top = (1.0 - tx.frac) * frame.at(ty.lo, tx.lo, c) + tx.frac * frame.at(ty.lo, tx.hi, c);
        const double bottom = (1.0 - tx.frac) * frame.at(ty.hi, tx.lo, c) + tx.frac * frame.at(ty.hi, tx.hi, c);
        const double v = (1.0 - ty.frac) * top + ty.frac * bottom;
        out.at(y, x, c) = static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
      }
    }
  }
  return out;
}

Frame normalize_frame(const Frame& frame) {
  if (frame.is_normalized() && frame.rgb.size() == static_cast<std::size_t>(kFrameHeight) * kFrameWidth * 3)
    return frame;
  return resize_bilinear(frame, kFrameHeight, kFrameWidth);
}

ImageSequence pad_short_sequence(const ImageSequence& seq, std::size_t min_len) {
  if (seq.frames.empty() || seq.frames.size() >= min_len) return seq;

  ImageSequence out{seq.person, seq.camera, {}};
  std::size_t front = 0;
  std::size_t back = 0;
  for (std::size_t added = 0; seq.frames.size() + added < min_len; ++added) {
    if (added % 2 == 0)
      ++back;
    else
      ++front;
  }
  out.frames.reserve(min_len);
  for (std::size_t i = 0; i < front; ++i) out.frames.push_back(seq.frames.front());
  out.frames.insert(out.frames.end(), seq.frames.begin(), seq.frames.end());
  for (std::size_t i = 0; i < back; ++i) out.frames.push_back(seq.frames.back());
  for (std::size_t i = 0; i < out.frames.size(); ++i) out.frames[i].index = static_cast<int>(i);
  return out;
}

}  // namespace dvr
