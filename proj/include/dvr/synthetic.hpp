#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "dvr/core.hpp"

namespace dvr::synth {

using Rgb = std::array<double, 3>;

/// Appearance and gait of one synthetic walker.
struct PersonSignature {
  Rgb head;
  Rgb torso;
  Rgb legs;
  int period = 12;          // flow-energy period in frames; a full leg swing spans 2 periods
  double amplitude = 6.0;   // foot displacement in pixels
  int torso_width = 22;
  int leg_width = 8;
  int stripe_row = 40;      // torso band in a darker shade
};

struct SyntheticSpec {
  int persons = 8;
  int frames = 60;
  double noise = 0.0;  // 0 = clean; per-pixel jitter, cross-view colour shift and gait jitter scale with it
  double occlusion_threshold = 0.5;  // occluding blocks appear above this noise level
  std::uint64_t seed = 0;
  int min_period = 10;
  int max_period = 18;
  int fragment_half_width = 10;
  std::vector<PersonSignature> signatures;  // optional override, one per person

  void validate() const;
};

inline constexpr const char* kCameraA = "cam_a";
inline constexpr const char* kCameraB = "cam_b";

std::vector<PersonSignature> make_signatures(const SyntheticSpec& spec);

/// Clean or noisy rendering of one walker under one camera (0 = a, 1 = b).
ImageSequence render_sequence(const PersonSignature& person, int camera, const SyntheticSpec& spec,
                              std::uint64_t stream_salt, const std::string& person_id);

std::vector<PersonPair> synthesize(const SyntheticSpec& spec);

/// Writes pairs in the dataset layout (<root>/<camera>/<person>/fNNNN.png).
void write_dataset(const std::filesystem::path& root, const std::vector<PersonPair>& pairs);

void generate_synthetic(const SyntheticSpec& spec, const std::filesystem::path& root);

}  // namespace dvr::synth
