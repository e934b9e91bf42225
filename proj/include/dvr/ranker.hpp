#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "dvr/features.hpp"

namespace dvr::ranker {

/// Descriptor sets of one training person. Both views are required by
/// build_bags.
struct PersonViews {
  std::string person;
  std::optional<features::DescriptorSet> a;
  std::optional<features::DescriptorSet> b;
};

/// Absolute-difference instances of one person, stored column-wise.
/// Positive column m * |X^b_i| + n pairs fragment m of view a with
/// fragment n of view b.
struct InstanceBags {
  std::string person;
  Eigen::MatrixXd positive;
  Eigen::MatrixXd negative;
  double negative_fraction = 1.0;
  std::uint64_t seed = 0;

  Eigen::Index dim() const { return positive.rows(); }
};

/// a -> b pairing only. Negatives are drawn without replacement from the
/// pool of (a-fragment of i, b-fragment of j != i) pairs; at least one per
/// person is kept.
std::vector<InstanceBags> build_bags(std::span<const PersonViews> persons, double negative_fraction,
                                     std::uint64_t seed);

/// Chosen positive columns for one person. `uniform` is the bag-average
/// pseudo-selection used before the first selecting step.
struct SelectionVector {
  std::vector<Eigen::Index> chosen;
  bool uniform = false;

  static SelectionVector average() { return {{}, true}; }
  static SelectionVector single(Eigen::Index index) { return {{index}, false}; }
};

bool same_selection(const SelectionVector& lhs, const SelectionVector& rhs);

/// Score of the selection's anchor: the bag mean for the uniform selection.
Eigen::VectorXd selection_anchor(const InstanceBags& bag, const SelectionVector& selection, Eigen::Index slot = 0);

/// xi*_m = max(0, 1 - selected + negative_m), linear hinge.
std::vector<double> compute_slacks(double selected_score, const Eigen::VectorXd& negative_scores);
std::vector<double> compute_slacks(const Eigen::VectorXd& w, const InstanceBags& bag, Eigen::Index selected);

/// q(v): summed slacks, added over every chosen column (or the bag mean).
double selection_cost(const Eigen::VectorXd& w, const InstanceBags& bag, const SelectionVector& selection);

/// Per person: the positive column minimizing q; lowest index on ties.
std::vector<SelectionVector> selecting_step_single(const Eigen::VectorXd& w, std::span<const InstanceBags> bags);

/// gamma_m = sum over negatives of (1 - xi*) with column m selected.
std::vector<double> quality_scores(const Eigen::VectorXd& w, const InstanceBags& bag);

/// Per person: the k highest-gamma columns, gamma descending, ties by index.
std::vector<SelectionVector> select_topk(const Eigen::VectorXd& w, std::span<const InstanceBags> bags, int k);

// ---------------------------------------------------------------------------
// Primal RankSVM

struct SolverOptions {
  double tolerance = 1e-6;  // gradient norm
  int max_newton_steps = 50;
  int max_cg_iterations = 1000;
  double cg_relative_tolerance = 1e-10;
};

/// 1/2 |w|^2 + C sum max(0, 1 - (anchor - negative)^T w)^2 over every
/// (anchor, negative) pair of each person.
class RankingProblem {
 public:
  RankingProblem(std::span<const InstanceBags> bags, std::span<const SelectionVector> selections, double C);

  double objective(const Eigen::VectorXd& w) const;
  Eigen::VectorXd gradient(const Eigen::VectorXd& w) const;
  /// Generalized Hessian at w applied to v.
  Eigen::VectorXd hessian_times(const Eigen::VectorXd& w, const Eigen::VectorXd& v) const;

  std::size_t constraint_count() const;
  Eigen::Index dim() const { return negatives_.rows(); }
  double C() const { return c_; }

  /// Margins (anchor - negative)^T w of every constraint, group by group.
  std::vector<double> margins(const Eigen::VectorXd& w) const;

 private:
  struct Group {
    Eigen::Index anchor_begin, anchor_end;
    Eigen::Index negative_begin, negative_end;
  };

  Eigen::MatrixXd anchors_;
  Eigen::MatrixXd negatives_;
  std::vector<Group> groups_;
  double c_;
};

struct SolverResult {
  Eigen::VectorXd w;
  int newton_steps = 0;
  bool converged = false;
  double gradient_norm = 0.0;
  std::vector<double> objective_trace;  // objective before each step, then final
};

SolverResult solve_rank_svm(const RankingProblem& problem, const SolverOptions& options,
                            const Eigen::VectorXd& start);

/// Ranking step: fix selections, fit w.
SolverResult ranking_step(std::span<const InstanceBags> bags, std::span<const SelectionVector> selections, double C,
                          const SolverOptions& options, const Eigen::VectorXd& start);

// ---------------------------------------------------------------------------
// Alternating training

enum class SelectionRule { Auto, Single, TopK };

struct TrainOptions {
  double C = 1.0;
  int k = 3;
  int max_iters = 20;
  SolverOptions solver;
  SelectionRule rule = SelectionRule::Auto;  // Auto: single when k == 1
};

struct IterationRecord {
  int iteration = 0;
  double objective = 0.0;
  int newton_steps = 0;
  double cost_before = 0.0;  // sum_i q(v_i) of the previous selections at the new w
  double cost_after = 0.0;   // same for the fresh selections
  std::size_t constraints = 0;
  std::vector<SelectionVector> selections;
};

struct RankModel {
  Eigen::VectorXd w;
  double C = 1.0;
  int k = 1;
  features::FeatureMode feature_mode = features::FeatureMode::ColHog3d;
  bool converged = false;
  int iterations = 0;
  std::vector<SelectionVector> selections;
  std::vector<IterationRecord> history;
};

RankModel train_dvr(std::span<const InstanceBags> bags, const TrainOptions& options);

// ---------------------------------------------------------------------------
// Model file

std::string serialize_model(const RankModel& model);
RankModel parse_model(std::string_view text);
void save_model(const std::string& path, const RankModel& model);
RankModel load_model(const std::string& path);

}  // namespace dvr::ranker
