#include <algorithm>
#include <cmath>

#include "dvr/features.hpp"

namespace dvr::features {

std::vector<CellSpan> cell_spans(int length, int cells) {
  if (cells < 1 || length < cells + 1)
    throw Error(ErrorKind::ShapeError, "cannot tile " + std::to_string(length) + " samples with " +
                                           std::to_string(cells) + " overlapping cells");
  const int extent = (2 * length) / (cells + 1);
  const int stride = length / (cells + 1);
  std::vector<CellSpan> spans(cells);
  for (int i = 0; i < cells; ++i) spans[i] = {i * stride, i * stride + extent};
  spans.back().end = length;
  return spans;
}

const std::array<Eigen::Vector3d, kHog3dBins>& icosahedron_normals() {
  static const std::array<Eigen::Vector3d, kHog3dBins> normals = [] {
    // Face centres of the icosahedron are the vertices of its dual dodecahedron.
    const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
    const double inv = 1.0 / phi;
    std::array<Eigen::Vector3d, kHog3dBins> n;
    int k = 0;
    for (int sx : {-1, 1})
      for (int sy : {-1, 1})
        for (int sz : {-1, 1}) n[k++] = Eigen::Vector3d(sx, sy, sz);
    for (int s1 : {-1, 1})
      for (int s2 : {-1, 1}) {
        n[k++] = Eigen::Vector3d(0, s1 * inv, s2 * phi);
        n[k++] = Eigen::Vector3d(s1 * inv, s2 * phi, 0);
        n[k++] = Eigen::Vector3d(s1 * phi, 0, s2 * inv);
      }
    for (auto& v : n) v.normalize();
    return n;
  }();
  return normals;
}

double hog3d_projection_threshold() {
  static const double tau = [] {
    const auto& n = icosahedron_normals();
    double adjacent = -1.0;
    for (int i = 0; i < kHog3dBins; ++i)
      for (int j = i + 1; j < kHog3dBins; ++j) adjacent = std::max(adjacent, n[i].dot(n[j]));
    return std::sqrt((1.0 + adjacent) / 2.0);
  }();
  return tau;
}

std::array<double, kHog3dBins> quantize_gradient(const Eigen::Vector3d& gradient) {
  std::array<double, kHog3dBins> bins{};
  const double magnitude = gradient.norm();
  if (magnitude == 0.0) return bins;

  const auto& normals = icosahedron_normals();
  std::array<double, kHog3dBins> proj;
  double best = 0.0;
  for (int i = 0; i < kHog3dBins; ++i) {
    proj[i] = normals[i].x() * gradient.x() + normals[i].y() * gradient.y() + normals[i].z() * gradient.z();
    best = std::max(best, proj[i]);
  }
  const double cut = hog3d_projection_threshold() * best;
  double total = 0.0;
  for (int i = 0; i < kHog3dBins; ++i) {
    proj[i] = std::max(proj[i] - cut, 0.0);
    total += proj[i];
  }
  const double scale = magnitude / total;
  for (int i = 0; i < kHog3dBins; ++i) bins[i] = proj[i] * scale;
  return bins;
}

Eigen::VectorXd hog3d_descriptor(const motion::Fragment& fragment, const Hog3dConfig& config) {
  const int depth = static_cast<int>(fragment.frames.size());
  if (depth != config.fragment_length)
    throw Error(ErrorKind::ShapeError, "fragment has " + std::to_string(depth) + " frames, expected " +
                                           std::to_string(config.fragment_length));
  for (const Frame& f : fragment.frames)
    if (!f.is_normalized()) throw Error(ErrorKind::ShapeError, "fragment frames must be 128x64");

  constexpr int h = kFrameHeight;
  constexpr int w = kFrameWidth;
  const std::size_t plane = static_cast<std::size_t>(h) * w;
  std::vector<double> volume(plane * depth);
  for (int t = 0; t < depth; ++t) {
    const Frame& f = fragment.frames[t];
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x)
        volume[t * plane + static_cast<std::size_t>(y) * w + x] = luma(f.at(y, x, 0), f.at(y, x, 1), f.at(y, x, 2));
  }
  auto vox = [&](int t, int y, int x) { return volume[t * plane + static_cast<std::size_t>(y) * w + x]; };

  // Each axis is cut at every cell boundary into disjoint segments; votes are
  // accumulated per segment block and then folded into the overlapping cells.
  struct Axis {
    std::vector<int> segment_of;               // per coordinate
    std::vector<std::vector<int>> cells_of;    // per segment
  };
  auto make_axis = [](int length, int cells) {
    const auto spans = cell_spans(length, cells);
    std::vector<int> cuts{0, length};
    for (const auto& s : spans) {
      cuts.push_back(s.begin);
      cuts.push_back(s.end);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    Axis a;
    a.segment_of.resize(length);
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
      for (int i = cuts[k]; i < cuts[k + 1]; ++i) a.segment_of[i] = static_cast<int>(k);
      std::vector<int> covering;
      for (int c = 0; c < cells; ++c)
        if (spans[c].begin <= cuts[k] && cuts[k + 1] <= spans[c].end) covering.push_back(c);
      a.cells_of.push_back(std::move(covering));
    }
    return a;
  };
  const Axis ax = make_axis(w, config.cells_x);
  const Axis ay = make_axis(h, config.cells_y);
  const Axis at = make_axis(depth, config.cells_t);
  const int sx = static_cast<int>(ax.cells_of.size());
  const int sy = static_cast<int>(ay.cells_of.size());
  const int st = static_cast<int>(at.cells_of.size());
  std::vector<double> blocks(static_cast<std::size_t>(sx) * sy * st * kHog3dBins, 0.0);

  double nx[kHog3dBins], ny[kHog3dBins], nt[kHog3dBins];
  for (int b = 0; b < kHog3dBins; ++b) {
    nx[b] = icosahedron_normals()[b].x();
    ny[b] = icosahedron_normals()[b].y();
    nt[b] = icosahedron_normals()[b].z();
  }
  const double tau = hog3d_projection_threshold();
  double proj[kHog3dBins];
  for (int t = 0; t < depth; ++t) {
    const int t0 = std::max(t - 1, 0), t1 = std::min(t + 1, depth - 1);
    for (int y = 0; y < h; ++y) {
      const int y0 = std::max(y - 1, 0), y1 = std::min(y + 1, h - 1);
      double* row = blocks.data() + (static_cast<std::size_t>(at.segment_of[t]) * sy + ay.segment_of[y]) * sx * kHog3dBins;
      for (int x = 0; x < w; ++x) {
        const int x0 = std::max(x - 1, 0), x1 = std::min(x + 1, w - 1);
        const double gx = 0.5 * (vox(t, y, x1) - vox(t, y, x0));
        const double gy = 0.5 * (vox(t, y1, x) - vox(t, y0, x));
        const double gt = 0.5 * (vox(t1, y, x) - vox(t0, y, x));
        if (gx == 0.0 && gy == 0.0 && gt == 0.0) continue;

        // Same arithmetic as quantize_gradient, inlined.
        const double magnitude = std::sqrt(gx * gx + gy * gy + gt * gt);
        double best = 0.0;
        for (int b = 0; b < kHog3dBins; ++b) {
          proj[b] = nx[b] * gx + ny[b] * gy + nt[b] * gt;
          best = std::max(best, proj[b]);
        }
        const double cut = tau * best;
        double total = 0.0;
        for (int b = 0; b < kHog3dBins; ++b) {
          proj[b] = std::max(proj[b] - cut, 0.0);
          total += proj[b];
        }
        const double scale = magnitude / total;
        double* block = row + static_cast<std::size_t>(ax.segment_of[x]) * kHog3dBins;
        for (int b = 0; b < kHog3dBins; ++b) block[b] += proj[b] * scale;
      }
    }
  }

  const int cell_count = config.cells_x * config.cells_y * config.cells_t;
  Eigen::VectorXd hist = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(cell_count) * kHog3dBins);
  for (int bt = 0; bt < st; ++bt)
    for (int by = 0; by < sy; ++by)
      for (int bx = 0; bx < sx; ++bx) {
        const double* block = blocks.data() + ((static_cast<std::size_t>(bt) * sy + by) * sx + bx) * kHog3dBins;
        for (int ct : at.cells_of[bt])
          for (int cy : ay.cells_of[by])
            for (int cx : ax.cells_of[bx]) {
              double* cell = hist.data() +
                             ((static_cast<Eigen::Index>(ct) * config.cells_y + cy) * config.cells_x + cx) * kHog3dBins;
              for (int b = 0; b < kHog3dBins; ++b) cell[b] += block[b];
            }
      }

  for (int c = 0; c < cell_count; ++c) {
    auto cell = hist.segment(static_cast<Eigen::Index>(c) * kHog3dBins, kHog3dBins);
    const double norm = cell.norm();
    if (norm > 1e-12) cell /= norm;
  }
  return hist;
}

}  // namespace dvr::features
