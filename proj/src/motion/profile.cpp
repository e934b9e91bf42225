#include <algorithm>
#include <cmath>

#include "dvr/motion.hpp"
#include "dvr/parallel.hpp"

namespace dvr::motion {

std::vector<double> gaussian_smooth(std::span<const double> values, double sigma) {
  std::vector<double> out(values.begin(), values.end());
  if (sigma <= 0.0 || values.empty()) return out;

  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> kernel(2 * radius + 1);
  double total = 0.0;
  for (int k = -radius; k <= radius; ++k) {
    kernel[k + radius] = std::exp(-0.5 * (k * k) / (sigma * sigma));
    total += kernel[k + radius];
  }
  for (double& k : kernel) k /= total;

  const int n = static_cast<int>(values.size());
  for (int i = 0; i < n; ++i) {
    double acc = 0.0;
    for (int k = -radius; k <= radius; ++k) acc += kernel[k + radius] * values[std::clamp(i + k, 0, n - 1)];
    out[i] = acc;
  }
  return out;
}

FlowEnergyProfile fep_profile(const ImageSequence& seq, double sigma, const FlowParams& params) {
  const std::size_t t_count = seq.frames.size();
  if (t_count < 2)
    throw Error(ErrorKind::SequenceTooShort, "flow energy profile needs at least 2 frames, got " +
                                                 std::to_string(t_count));

  FlowEnergyProfile profile;
  profile.sigma = sigma;
  profile.raw.assign(t_count, 0.0);
  parallel_for(t_count - 1, [&](std::size_t i) {
    profile.raw[i + 1] = flow_energy(compute_flow(seq.frames[i], seq.frames[i + 1], params));
  });
  profile.raw[0] = profile.raw[1];
  profile.smoothed = gaussian_smooth(profile.raw, sigma);
  return profile;
}

}  // namespace dvr::motion
