#include <algorithm>
#include <cstdio>
#include <map>
#include <ostream>

#include "dvr/features.hpp"
#include "dvr/parallel.hpp"

namespace dvr::features {

std::string_view feature_mode_name(FeatureMode mode) {
  switch (mode) {
    case FeatureMode::ColHog3d: return "colhog3d";
    case FeatureMode::Hog3d: return "hog3d";
    case FeatureMode::Colour: return "colour";
  }
  return "?";
}

FeatureMode parse_feature_mode(std::string_view name) {
  if (name == "colhog3d") return FeatureMode::ColHog3d;
  if (name == "hog3d") return FeatureMode::Hog3d;
  if (name == "colour") return FeatureMode::Colour;
  throw Error(ErrorKind::ConfigError, "unknown feature mode '" + std::string(name) + "'");
}

namespace {

std::size_t hog3d_length(const Hog3dConfig& c) {
  return static_cast<std::size_t>(c.cells_x) * c.cells_y * c.cells_t * kHog3dBins;
}

constexpr std::size_t kColourLength = static_cast<std::size_t>((kFrameHeight - kPatchHeight) / kPatchStrideY + 1) *
                                      ((kFrameWidth - kPatchWidth) / kPatchStrideX + 1) * kColourChannels;

bool uses_hog3d(FeatureMode m) { return m != FeatureMode::Colour; }
bool uses_colour(FeatureMode m) { return m != FeatureMode::Hog3d; }

Eigen::VectorXd combine(const FragmentDescriptor& d, FeatureMode mode) {
  Eigen::VectorXd out(static_cast<Eigen::Index>((uses_hog3d(mode) ? d.hog3d.size() : 0) +
                                                (uses_colour(mode) ? d.colour.size() : 0)));
  Eigen::Index o = 0;
  if (uses_hog3d(mode)) {
    out.segment(o, d.hog3d.size()) = d.hog3d;
    o += d.hog3d.size();
  }
  if (uses_colour(mode)) out.segment(o, d.colour.size()) = d.colour;
  return out;
}

}  // namespace

std::size_t descriptor_length(const FeatureConfig& config) {
  return (uses_hog3d(config.mode) ? hog3d_length(config.hog3d) : 0) + (uses_colour(config.mode) ? kColourLength : 0);
}

DescriptorSet describe_sequence(const std::string& person, const std::string& camera,
                                std::span<const motion::Fragment> fragments, const FeatureConfig& config) {
  if (fragments.empty())
    throw Error(ErrorKind::EmptyFragmentSet, "no fragments to describe for " + person + "/" + camera);

  // Overlapping fragments share frames: colour vectors are computed once per
  // distinct frame.
  std::vector<const Frame*> distinct;
  std::vector<std::vector<std::size_t>> slot(fragments.size());
  if (uses_colour(config.mode)) {
    std::map<int, std::vector<std::size_t>> by_index;
    for (std::size_t i = 0; i < fragments.size(); ++i)
      for (const Frame& f : fragments[i].frames) {
        auto& candidates = by_index[f.index];
        auto it = std::find_if(candidates.begin(), candidates.end(),
                               [&](std::size_t c) { return distinct[c]->rgb == f.rgb; });
        if (it == candidates.end()) {
          candidates.push_back(distinct.size());
          distinct.push_back(&f);
          slot[i].push_back(distinct.size() - 1);
        } else {
          slot[i].push_back(*it);
        }
      }
  }
  std::vector<Eigen::VectorXd> frame_colour(distinct.size());
  parallel_for(distinct.size(), [&](std::size_t j) { frame_colour[j] = frame_colour_vector(*distinct[j]); });

  DescriptorSet set{person, camera, std::vector<FragmentDescriptor>(fragments.size())};
  parallel_for(fragments.size(), [&](std::size_t i) {
    FragmentDescriptor& d = set.descriptors[i];
    d.fragment_index = static_cast<int>(i);
    d.landmark = fragments[i].landmark;
    if (uses_hog3d(config.mode)) d.hog3d = hog3d_descriptor(fragments[i], config.hog3d);
    if (uses_colour(config.mode)) {
      if (fragments[i].frames.empty()) throw Error(ErrorKind::ShapeError, "empty fragment");
      std::vector<const Eigen::VectorXd*> refs;
      for (std::size_t j : slot[i]) refs.push_back(&frame_colour[j]);
      d.colour = temporal_colour_mean(refs);
    }
    d.combined = combine(d, config.mode);
  });
  return set;
}

DescriptorSet with_mode(const DescriptorSet& set, FeatureMode mode) {
  DescriptorSet out = set;
  for (auto& d : out.descriptors) {
    if ((uses_hog3d(mode) && d.hog3d.size() == 0) || (uses_colour(mode) && d.colour.size() == 0))
      throw Error(ErrorKind::ShapeError, "descriptor set lacks the parts needed for mode " +
                                             std::string(feature_mode_name(mode)));
    d.combined = combine(d, mode);
  }
  return out;
}

void write_descriptors(std::ostream& out, const DescriptorSet& set) {
  char buf[32];
  for (const auto& d : set.descriptors) {
    out << set.person << ' ' << set.camera << ' ' << d.fragment_index;
    for (Eigen::Index i = 0; i < d.combined.size(); ++i) {
      std::snprintf(buf, sizeof buf, " %.17g", d.combined[i]);
      out << buf;
    }
    out << '\n';
  }
}

}  // namespace dvr::features
