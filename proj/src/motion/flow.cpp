#include <cmath>

#include "dvr/motion.hpp"

namespace dvr::motion {

namespace {

// Grid with a one-pixel border so the 3x3 averaging stencil needs no branches.
class PaddedGrid {
 public:
  PaddedGrid(int h, int w) : h_(h), w_(w), stride_(w + 2), data_(static_cast<std::size_t>(h + 2) * (w + 2), 0.0f) {}

  float* row(int y) { return data_.data() + static_cast<std::size_t>(y + 1) * stride_ + 1; }
  const float* row(int y) const { return data_.data() + static_cast<std::size_t>(y + 1) * stride_ + 1; }

  void replicate_border() {
    for (int y = 0; y < h_; ++y) {
      float* r = row(y);
      r[-1] = r[0];
      r[w_] = r[w_ - 1];
    }
    std::copy(row(0) - 1, row(0) + w_ + 1, row(-1) - 1);
    std::copy(row(h_ - 1) - 1, row(h_ - 1) + w_ + 1, row(h_) - 1);
  }

 private:
  int h_;
  int w_;
  int stride_;
  std::vector<float> data_;
};

std::vector<float> intensity(const Frame& f) {
  std::vector<float> out(static_cast<std::size_t>(f.height) * f.width);
  for (int y = 0; y < f.height; ++y)
    for (int x = 0; x < f.width; ++x)
      out[static_cast<std::size_t>(y) * f.width + x] =
          static_cast<float>(luma(f.at(y, x, 0), f.at(y, x, 1), f.at(y, x, 2)) / 255.0);
  return out;
}

// Local weighted mean of the 8-neighbourhood (1/6 edge, 1/12 corner).
void neighbour_mean(const PaddedGrid& src, PaddedGrid& dst, int h, int w) {
  constexpr float kEdge = 1.0f / 6.0f;
  constexpr float kCorner = 1.0f / 12.0f;
  for (int y = 0; y < h; ++y) {
    const float* up = src.row(y - 1);
    const float* mid = src.row(y);
    const float* down = src.row(y + 1);
    float* out = dst.row(y);
    for (int x = 0; x < w; ++x) {
      out[x] = kEdge * (up[x] + down[x] + mid[x - 1] + mid[x + 1]) +
               kCorner * (up[x - 1] + up[x + 1] + down[x - 1] + down[x + 1]);
    }
  }
}

}  // namespace

FlowField compute_flow(const Frame& prev, const Frame& next, const FlowParams& params) {
  if (prev.height != next.height || prev.width != next.width || prev.empty())
    throw Error(ErrorKind::ShapeError, "flow frames must share non-zero dimensions");

  const int h = prev.height;
  const int w = prev.width;
  const auto e1 = intensity(prev);
  const auto e2 = intensity(next);
  auto at = [w](const std::vector<float>& e, int y, int x) { return e[static_cast<std::size_t>(y) * w + x]; };

  // Derivatives estimated at the centre of the 2x2x2 cube, as in the
  // original formulation; the far edges reuse the last row/column.
  const std::size_t n = static_cast<std::size_t>(h) * w;
  std::vector<float> ex(n), ey(n), et(n), gain_x(n), gain_y(n);
  for (int y = 0; y < h; ++y) {
    const int y1 = std::min(y + 1, h - 1);
    for (int x = 0; x < w; ++x) {
      const int x1 = std::min(x + 1, w - 1);
      const float a00 = at(e1, y, x), a01 = at(e1, y, x1), a10 = at(e1, y1, x), a11 = at(e1, y1, x1);
      const float b00 = at(e2, y, x), b01 = at(e2, y, x1), b10 = at(e2, y1, x), b11 = at(e2, y1, x1);
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      ex[i] = 0.25f * ((a01 - a00) + (a11 - a10) + (b01 - b00) + (b11 - b10));
      ey[i] = 0.25f * ((a10 - a00) + (a11 - a01) + (b10 - b00) + (b11 - b01));
      et[i] = 0.25f * ((b00 - a00) + (b01 - a01) + (b10 - a10) + (b11 - a11));
      const float denom = static_cast<float>(params.lambda) + ex[i] * ex[i] + ey[i] * ey[i];
      gain_x[i] = ex[i] / denom;
      gain_y[i] = ey[i] / denom;
    }
  }

  PaddedGrid u(h, w), v(h, w), u_mean(h, w), v_mean(h, w);
  for (int it = 0; it < params.iterations; ++it) {
    u.replicate_border();
    v.replicate_border();
    neighbour_mean(u, u_mean, h, w);
    neighbour_mean(v, v_mean, h, w);
    for (int y = 0; y < h; ++y) {
      const float* um = u_mean.row(y);
      const float* vm = v_mean.row(y);
      float* ur = u.row(y);
      float* vr = v.row(y);
      const std::size_t base = static_cast<std::size_t>(y) * w;
      for (int x = 0; x < w; ++x) {
        const std::size_t i = base + x;
        const float t = ex[i] * um[x] + ey[i] * vm[x] + et[i];
        ur[x] = um[x] - gain_x[i] * t;
        vr[x] = vm[x] - gain_y[i] * t;
      }
    }
  }

  FlowField flow{h, w, std::vector<float>(n), std::vector<float>(n)};
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      flow.vx[static_cast<std::size_t>(y) * w + x] = u.row(y)[x];
      flow.vy[static_cast<std::size_t>(y) * w + x] = v.row(y)[x];
    }
  return flow;
}

double flow_energy(const FlowField& flow) {
  double energy = 0.0;
  for (int y = flow.height / 2; y < flow.height; ++y)
    for (int x = 0; x < flow.width; ++x) {
      const double u = flow.u(y, x);
      const double v = flow.v(y, x);
      energy += std::sqrt(u * u + v * v);
    }
  return energy;
}

}  // namespace dvr::motion
