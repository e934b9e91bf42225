#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dvr/core.hpp"
#include "dvr/features.hpp"
#include "dvr/matcher.hpp"
#include "dvr/motion.hpp"
#include "dvr/ranker.hpp"

namespace dvr::cli {

struct Config {
  int L = 10;
  double sigma = 2.0;
  double C = 1.0;
  int k = 3;
  double negative_fraction = 0.10;
  features::FeatureMode feature_mode = features::FeatureMode::ColHog3d;
  std::uint64_t seed = 0;
  int max_iters = 20;
  double solver_tolerance = 1e-6;
  int solver_max_newton = 50;
  double flow_lambda = 0.1;
  int flow_iterations = 100;

  void validate() const;

  motion::FlowParams flow_params() const { return {flow_lambda, flow_iterations}; }
  features::FeatureConfig feature_config() const;
  ranker::TrainOptions train_options() const;
};

/// Sets one key of the key=value format; ConfigError on unknown keys or
/// unparsable values.
void apply_setting(Config& config, std::string_view key, std::string_view value);

std::string serialize_config(const Config& config);
/// `#` starts a comment; blank lines are ignored. Keys absent from the text
/// keep the values already in `base`.
Config parse_config(std::string_view text, Config base = {});
Config load_config(const std::filesystem::path& path, Config base = {});
void save_config(const std::filesystem::path& path, const Config& config);

// ---------------------------------------------------------------------------
// Pipeline

struct SequenceAnalysis {
  motion::FlowEnergyProfile profile;
  std::vector<motion::Landmark> landmarks;  // every detected extremum
  std::vector<motion::Fragment> fragments;
  bool fallback = false;  // no landmark had enough context
};

/// Pads short sequences to 2L+1 frames, computes the profile and cuts
/// fragments, falling back to the central fragment.
SequenceAnalysis analyse_sequence(const ImageSequence& seq, const Config& config);

features::DescriptorSet describe(const ImageSequence& seq, const Config& config);

/// Descriptor sets of both views of every pair.
std::vector<ranker::PersonViews> describe_pairs(std::span<const PersonPair> pairs, const Config& config);

/// Re-expresses already computed descriptor sets under another feature mode.
std::vector<ranker::PersonViews> views_with_mode(std::span<const ranker::PersonViews> views,
                                                 features::FeatureMode mode);

ranker::RankModel train_model(std::span<const ranker::PersonViews> views, const Config& config);

/// Probes are the view-a sets, the gallery is every view-b set.
std::vector<matcher::RankedGallery> evaluate(const ranker::RankModel& model,
                                             std::span<const ranker::PersonViews> views);

// ---------------------------------------------------------------------------
// Command line

/// Runs `dvr <subcommand> ...`. argv[0] is the program name. Returns the
/// process exit status; diagnostics go to `err`.
int run_command(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err);
int run_command(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace dvr::cli
