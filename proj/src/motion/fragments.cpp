#include <algorithm>

#include "dvr/motion.hpp"

namespace dvr::motion {

std::string_view landmark_kind_name(LandmarkKind kind) {
  switch (kind) {
    case LandmarkKind::Minimum: return "min";
    case LandmarkKind::Maximum: return "max";
    case LandmarkKind::Centre: return "centre";
  }
  return "?";
}

std::vector<Landmark> find_landmarks(std::span<const double> profile) {
  std::vector<Landmark> out;
  const std::size_t n = profile.size();
  std::size_t i = 1;
  while (i + 1 < n) {
    std::size_t end = i + 1;
    while (end < n && profile[end] == profile[i]) ++end;
    if (end == n) break;  // plateau runs into the last sample
    const double left = profile[i - 1];
    const double right = profile[end];
    if (profile[i] > left && profile[i] > right)
      out.push_back({static_cast<int>(i), LandmarkKind::Maximum});
    else if (profile[i] < left && profile[i] < right)
      out.push_back({static_cast<int>(i), LandmarkKind::Minimum});
    i = end;
  }
  return out;
}

namespace {

Fragment make_fragment(const ImageSequence& seq, int centre, LandmarkKind kind, int half_width) {
  Fragment f{seq.person, seq.camera, centre, kind, {}};
  f.frames.assign(seq.frames.begin() + (centre - half_width), seq.frames.begin() + (centre + half_width + 1));
  return f;
}

}  // namespace

std::vector<Fragment> extract_fragments(const ImageSequence& seq, const FlowEnergyProfile& profile, int half_width) {
  const int t_count = static_cast<int>(seq.frames.size());
  if (profile.smoothed.size() != seq.frames.size())
    throw Error(ErrorKind::ShapeError, "profile length " + std::to_string(profile.smoothed.size()) +
                                           " does not match sequence length " + std::to_string(t_count));
  if (half_width < 0) throw Error(ErrorKind::ConfigError, "fragment half-width must be non-negative");

  std::vector<Fragment> out;
  for (const Landmark& lm : find_landmarks(profile.smoothed)) {
    if (lm.index < half_width || lm.index > t_count - 1 - half_width) continue;
    out.push_back(make_fragment(seq, lm.index, lm.kind, half_width));
  }
  if (out.empty())
    throw Error(ErrorKind::EmptyFragmentSet,
                "no landmark with full context in sequence " + seq.person + "/" + seq.camera);
  return out;
}

Fragment central_fragment(const ImageSequence& seq, int half_width) {
  const int t_count = static_cast<int>(seq.frames.size());
  if (t_count < 2 * half_width + 1)
    throw Error(ErrorKind::SequenceTooShort, "sequence shorter than one fragment window");
  const int centre = std::clamp(t_count / 2, half_width, t_count - 1 - half_width);
  return make_fragment(seq, centre, LandmarkKind::Centre, half_width);
}

}  // namespace dvr::motion
