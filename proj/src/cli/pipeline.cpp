#include "dvr/cli.hpp"
#include "dvr/parallel.hpp"

namespace dvr::cli {

SequenceAnalysis analyse_sequence(const ImageSequence& seq, const Config& config) {
  const ImageSequence padded = pad_short_sequence(seq, static_cast<std::size_t>(2 * config.L + 1));
  SequenceAnalysis out;
  out.profile = motion::fep_profile(padded, config.sigma, config.flow_params());
  out.landmarks = motion::find_landmarks(out.profile.smoothed);
  try {
    out.fragments = motion::extract_fragments(padded, out.profile, config.L);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::EmptyFragmentSet) throw;
    out.fragments.push_back(motion::central_fragment(padded, config.L));
    out.fallback = true;
  }
  return out;
}

features::DescriptorSet describe(const ImageSequence& seq, const Config& config) {
  const SequenceAnalysis analysis = analyse_sequence(seq, config);
  return features::describe_sequence(seq.person, seq.camera, analysis.fragments, config.feature_config());
}

std::vector<ranker::PersonViews> describe_pairs(std::span<const PersonPair> pairs, const Config& config) {
  std::vector<features::DescriptorSet> sets(2 * pairs.size());
  parallel_for(sets.size(), [&](std::size_t i) {
    const PersonPair& p = pairs[i / 2];
    sets[i] = describe(i % 2 == 0 ? p.a : p.b, config);
  });
  std::vector<ranker::PersonViews> views(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    views[i].person = pairs[i].person;
    views[i].a = std::move(sets[2 * i]);
    views[i].b = std::move(sets[2 * i + 1]);
  }
  return views;
}

std::vector<ranker::PersonViews> views_with_mode(std::span<const ranker::PersonViews> views,
                                                 features::FeatureMode mode) {
  std::vector<ranker::PersonViews> out;
  out.reserve(views.size());
  for (const auto& v : views) {
    ranker::PersonViews copy{v.person, {}, {}};
    if (v.a) copy.a = features::with_mode(*v.a, mode);
    if (v.b) copy.b = features::with_mode(*v.b, mode);
    out.push_back(std::move(copy));
  }
  return out;
}

ranker::RankModel train_model(std::span<const ranker::PersonViews> views, const Config& config) {
  config.validate();
  const auto bags = ranker::build_bags(views, config.negative_fraction, config.seed);
  ranker::RankModel model = ranker::train_dvr(bags, config.train_options());
  model.feature_mode = config.feature_mode;
  return model;
}

std::vector<matcher::RankedGallery> evaluate(const ranker::RankModel& model,
                                             std::span<const ranker::PersonViews> views) {
  std::vector<features::DescriptorSet> probes, gallery;
  std::vector<std::string> persons;
  for (const auto& v : views) {
    if (!v.a || !v.b) throw Error(ErrorKind::MissingView, "person " + v.person + " lacks a camera view");
    probes.push_back(*v.a);
    gallery.push_back(*v.b);
    persons.push_back(v.person);
  }
  if (gallery.empty()) throw Error(ErrorKind::EmptyGallery, "evaluation needs a non-empty gallery");

  const Eigen::MatrixXd scores = matcher::score_matrix(model.w, probes, gallery);
  std::vector<matcher::RankedGallery> ranked;
  ranked.reserve(probes.size());
  for (std::size_t p = 0; p < probes.size(); ++p) {
    const Eigen::VectorXd row = scores.row(static_cast<Eigen::Index>(p)).transpose();
    ranked.push_back(matcher::rank_scores(probes[p].person, probes[p].camera,
                                          std::span<const double>(row.data(), static_cast<std::size_t>(row.size())),
                                          persons));
  }
  return ranked;
}

}  // namespace dvr::cli
