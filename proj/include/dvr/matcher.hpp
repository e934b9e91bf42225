#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "dvr/ranker.hpp"

namespace dvr::matcher {

/// max over fragment pairs of w^T |x_p - x_g|.
double score_pair(const Eigen::VectorXd& w, const features::DescriptorSet& probe,
                  const features::DescriptorSet& gallery);
inline double score_pair(const ranker::RankModel& model, const features::DescriptorSet& probe,
                         const features::DescriptorSet& gallery) {
  return score_pair(model.w, probe, gallery);
}

struct RankedEntry {
  std::size_t gallery_index;
  std::string person;
  double score;
};

struct RankedGallery {
  std::string probe_person;
  std::string probe_camera;
  std::vector<RankedEntry> entries;  // descending score, ties by gallery index

  /// 1-based rank of `person`, or 0 when absent.
  std::size_t rank_of(const std::string& person) const;
};

/// Orders raw gallery scores; ties keep gallery index order.
RankedGallery rank_scores(const std::string& probe_person, const std::string& probe_camera,
                          std::span<const double> scores, std::span<const std::string> gallery_persons);

RankedGallery rank_gallery(const ranker::RankModel& model, const features::DescriptorSet& probe,
                           std::span<const features::DescriptorSet> gallery);

/// Raw probe x gallery score matrix (rows: probes).
Eigen::MatrixXd score_matrix(const Eigen::VectorXd& w, std::span<const features::DescriptorSet> probes,
                             std::span<const features::DescriptorSet> gallery);

struct FusionWeights {
  std::vector<double> alphas;
};

/// fused[g] = sum_i alpha_i external_i[g] + base[g].
std::vector<double> fuse_scores(std::span<const double> base, std::span<const std::vector<double>> external,
                                const FusionWeights& weights);

struct CmcCurve {
  std::vector<double> values;  // values[r] = match rate within rank r + 1
  std::size_t trials = 1;

  double at_rank(std::size_t rank) const { return values.at(rank - 1); }
};

/// Truth is the probe's own person id; MissingMatch when a gallery lacks it.
CmcCurve cmc_curve(std::span<const RankedGallery> ranked, std::size_t max_rank);
/// Arithmetic mean of per-trial curves.
CmcCurve cmc_curve(std::span<const std::vector<RankedGallery>> trials, std::size_t max_rank);
CmcCurve average_curves(std::span<const CmcCurve> curves);

bool is_monotone(const CmcCurve& curve);

/// `rank,match_rate` lines, LF endings.
std::string cmc_csv(const CmcCurve& curve);
/// Table of selected ranks: {1,5,10,20} for galleries of at least 20,
/// otherwise {1,2,3,4}.
std::string cmc_table(const CmcCurve& curve, std::size_t gallery_size);

}  // namespace dvr::matcher
