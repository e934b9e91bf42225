#include <algorithm>
#include <cstdio>
#include <limits>
#include <numeric>

#include "dvr/matcher.hpp"
#include "dvr/parallel.hpp"

namespace dvr::matcher {

double score_pair(const Eigen::VectorXd& w, const features::DescriptorSet& probe,
                  const features::DescriptorSet& gallery) {
  if (probe.descriptors.empty() || gallery.descriptors.empty())
    throw Error(ErrorKind::EmptyFragmentSet, "cannot score an empty descriptor set");
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& p : probe.descriptors) {
    if (p.combined.size() != w.size())
      throw Error(ErrorKind::ShapeError, "probe descriptor length " + std::to_string(p.combined.size()) +
                                             " does not match model length " + std::to_string(w.size()));
    for (const auto& g : gallery.descriptors) {
      if (g.combined.size() != w.size())
        throw Error(ErrorKind::ShapeError, "gallery descriptor length " + std::to_string(g.combined.size()) +
                                               " does not match model length " + std::to_string(w.size()));
      best = std::max(best, w.dot((p.combined - g.combined).cwiseAbs()));
    }
  }
  return best;
}

std::size_t RankedGallery::rank_of(const std::string& person) const {
  for (std::size_t r = 0; r < entries.size(); ++r)
    if (entries[r].person == person) return r + 1;
  return 0;
}

RankedGallery rank_scores(const std::string& probe_person, const std::string& probe_camera,
                          std::span<const double> scores, std::span<const std::string> gallery_persons) {
  if (scores.empty()) throw Error(ErrorKind::EmptyGallery, "gallery is empty");
  if (scores.size() != gallery_persons.size())
    throw Error(ErrorKind::ShapeError, "score count does not match gallery size");
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) { return scores[l] > scores[r]; });
  RankedGallery out{probe_person, probe_camera, {}};
  out.entries.reserve(order.size());
  for (std::size_t g : order) out.entries.push_back({g, gallery_persons[g], scores[g]});
  return out;
}

RankedGallery rank_gallery(const ranker::RankModel& model, const features::DescriptorSet& probe,
                           std::span<const features::DescriptorSet> gallery) {
  if (gallery.empty()) throw Error(ErrorKind::EmptyGallery, "gallery is empty");
  std::vector<double> scores(gallery.size());
  std::vector<std::string> persons(gallery.size());
  for (std::size_t g = 0; g < gallery.size(); ++g) {
    scores[g] = score_pair(model.w, probe, gallery[g]);
    persons[g] = gallery[g].person;
  }
  return rank_scores(probe.person, probe.camera, scores, persons);
}

Eigen::MatrixXd score_matrix(const Eigen::VectorXd& w, std::span<const features::DescriptorSet> probes,
                             std::span<const features::DescriptorSet> gallery) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(probes.size()), static_cast<Eigen::Index>(gallery.size()));
  parallel_for(probes.size(), [&](std::size_t p) {
    for (std::size_t g = 0; g < gallery.size(); ++g)
      out(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(g)) = score_pair(w, probes[p], gallery[g]);
  });
  return out;
}

std::vector<double> fuse_scores(std::span<const double> base, std::span<const std::vector<double>> external,
                                const FusionWeights& weights) {
  if (external.size() != weights.alphas.size())
    throw Error(ErrorKind::ShapeError, "one fusion weight per external score source is required");
  std::vector<double> fused(base.size(), 0.0);
  for (std::size_t g = 0; g < base.size(); ++g) {
    double acc = 0.0;
    for (std::size_t i = 0; i < external.size(); ++i) {
      if (external[i].size() != base.size())
        throw Error(ErrorKind::ShapeError, "external score list length differs from gallery size");
      acc += weights.alphas[i] * external[i][g];
    }
    fused[g] = acc + base[g];
  }
  return fused;
}

CmcCurve cmc_curve(std::span<const RankedGallery> ranked, std::size_t max_rank) {
  if (ranked.empty()) throw Error(ErrorKind::InsufficientData, "no ranked probes");
  if (max_rank < 1) throw Error(ErrorKind::ConfigError, "max_rank must be >= 1");
  std::vector<std::size_t> hits(max_rank, 0);
  for (const auto& r : ranked) {
    const std::size_t rank = r.rank_of(r.probe_person);
    if (rank == 0) throw Error(ErrorKind::MissingMatch, "true match of probe " + r.probe_person + " not in gallery");
    if (rank <= max_rank) ++hits[rank - 1];
  }
  CmcCurve curve;
  curve.values.resize(max_rank);
  std::size_t cumulative = 0;
  for (std::size_t r = 0; r < max_rank; ++r) {
    cumulative += hits[r];
    curve.values[r] = static_cast<double>(cumulative) / static_cast<double>(ranked.size());
  }
  return curve;
}

CmcCurve average_curves(std::span<const CmcCurve> curves) {
  if (curves.empty()) throw Error(ErrorKind::InsufficientData, "no curves to average");
  CmcCurve out;
  out.values.assign(curves.front().values.size(), 0.0);
  out.trials = 0;
  for (const auto& c : curves) {
    if (c.values.size() != out.values.size()) throw Error(ErrorKind::ShapeError, "curves differ in length");
    for (std::size_t r = 0; r < c.values.size(); ++r) out.values[r] += c.values[r];
    out.trials += c.trials;
  }
  for (double& v : out.values) v /= static_cast<double>(curves.size());
  return out;
}

CmcCurve cmc_curve(std::span<const std::vector<RankedGallery>> trials, std::size_t max_rank) {
  std::vector<CmcCurve> curves;
  curves.reserve(trials.size());
  for (const auto& t : trials) curves.push_back(cmc_curve(t, max_rank));
  return average_curves(curves);
}

bool is_monotone(const CmcCurve& curve) {
  for (std::size_t r = 0; r < curve.values.size(); ++r) {
    if (curve.values[r] < 0.0 || curve.values[r] > 1.0) return false;
    if (r > 0 && curve.values[r] < curve.values[r - 1]) return false;
  }
  return true;
}

std::string cmc_csv(const CmcCurve& curve) {
  std::string out = "rank,match_rate\n";
  char buf[64];
  for (std::size_t r = 0; r < curve.values.size(); ++r) {
    std::snprintf(buf, sizeof buf, "%zu,%.6f\n", r + 1, curve.values[r]);
    out += buf;
  }
  return out;
}

std::string cmc_table(const CmcCurve& curve, std::size_t gallery_size) {
  const std::vector<std::size_t> ranks = gallery_size >= 20 ? std::vector<std::size_t>{1, 5, 10, 20}
                                                            : std::vector<std::size_t>{1, 2, 3, 4};
  std::string out = "rank  match rate\n";
  char buf[64];
  for (std::size_t r : ranks) {
    if (r > curve.values.size()) break;
    std::snprintf(buf, sizeof buf, "%4zu  %6.2f%%\n", r, 100.0 * curve.values[r - 1]);
    out += buf;
  }
  return out;
}

}  // namespace dvr::matcher
