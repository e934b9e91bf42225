#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "dvr/core.hpp"

namespace dvr::motion {

struct FlowField {
  int height = 0;
  int width = 0;
  std::vector<float> vx;
  std::vector<float> vy;

  float u(int y, int x) const { return vx[static_cast<std::size_t>(y) * width + x]; }
  float v(int y, int x) const { return vy[static_cast<std::size_t>(y) * width + x]; }
};

/// Horn–Schunck settings. Intensities enter the solver scaled to [0, 1];
/// `lambda` is the squared smoothness weight in the Jacobi update.
struct FlowParams {
  double lambda = 0.1;
  int iterations = 100;
};

/// Dense flow from `prev` to `next` (single scale, deterministic).
FlowField compute_flow(const Frame& prev, const Frame& next, const FlowParams& params = {});

/// Sum of flow magnitudes over the lower half of the field.
double flow_energy(const FlowField& flow);

struct FlowEnergyProfile {
  std::vector<double> raw;
  std::vector<double> smoothed;
  double sigma = 0.0;
};

/// Gaussian smoothing, kernel radius ceil(3 sigma), edge-replicated.
/// sigma <= 0 returns the input.
std::vector<double> gaussian_smooth(std::span<const double> values, double sigma);

FlowEnergyProfile fep_profile(const ImageSequence& seq, double sigma, const FlowParams& params = {});

enum class LandmarkKind { Minimum, Maximum, Centre };

std::string_view landmark_kind_name(LandmarkKind kind);

struct Landmark {
  int index = 0;
  LandmarkKind kind = LandmarkKind::Minimum;
};

/// Strict interior extrema of `profile`; a plateau counts once, at its
/// leftmost index, when both flanks lie on the same side.
std::vector<Landmark> find_landmarks(std::span<const double> profile);

struct Fragment {
  std::string person;
  std::string camera;
  int landmark = 0;
  LandmarkKind kind = LandmarkKind::Minimum;
  std::vector<Frame> frames;  // I_{t-L} .. I_{t+L}

  int first_frame() const { return landmark - static_cast<int>(frames.size() / 2); }
  int last_frame() const { return landmark + static_cast<int>(frames.size() / 2); }
};

/// One fragment per landmark of the smoothed profile that has L frames of
/// context on both sides. Throws EmptyFragmentSet when none survive.
std::vector<Fragment> extract_fragments(const ImageSequence& seq, const FlowEnergyProfile& profile, int half_width);

/// Fragment centred at floor(T/2); used when no landmark survives.
Fragment central_fragment(const ImageSequence& seq, int half_width);

}  // namespace dvr::motion
