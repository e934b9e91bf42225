#include <algorithm>
#include <numeric>

#include "dvr/parallel.hpp"
#include "dvr/ranker.hpp"

namespace dvr::ranker {

bool same_selection(const SelectionVector& lhs, const SelectionVector& rhs) {
  if (lhs.uniform || rhs.uniform) return lhs.uniform == rhs.uniform;
  auto l = lhs.chosen;
  auto r = rhs.chosen;
  std::sort(l.begin(), l.end());
  std::sort(r.begin(), r.end());
  return l == r;
}

Eigen::VectorXd selection_anchor(const InstanceBags& bag, const SelectionVector& selection, Eigen::Index slot) {
  if (selection.uniform) return bag.positive.rowwise().mean();
  return bag.positive.col(selection.chosen.at(static_cast<std::size_t>(slot)));
}

std::vector<double> compute_slacks(double selected_score, const Eigen::VectorXd& negative_scores) {
  std::vector<double> xi(static_cast<std::size_t>(negative_scores.size()));
  for (Eigen::Index m = 0; m < negative_scores.size(); ++m)
    xi[m] = std::max(0.0, 1.0 - selected_score + negative_scores[m]);
  return xi;
}

std::vector<double> compute_slacks(const Eigen::VectorXd& w, const InstanceBags& bag, Eigen::Index selected) {
  return compute_slacks(bag.positive.col(selected).dot(w), bag.negative.transpose() * w);
}

namespace {

double summed_slack(double selected_score, const Eigen::VectorXd& negative_scores) {
  double q = 0.0;
  for (Eigen::Index m = 0; m < negative_scores.size(); ++m) q += std::max(0.0, 1.0 - selected_score + negative_scores[m]);
  return q;
}

}  // namespace

double selection_cost(const Eigen::VectorXd& w, const InstanceBags& bag, const SelectionVector& selection) {
  const Eigen::VectorXd neg = bag.negative.transpose() * w;
  if (selection.uniform) return summed_slack(selection_anchor(bag, selection).dot(w), neg);
  double q = 0.0;
  for (Eigen::Index c : selection.chosen) q += summed_slack(bag.positive.col(c).dot(w), neg);
  return q;
}

std::vector<SelectionVector> selecting_step_single(const Eigen::VectorXd& w, std::span<const InstanceBags> bags) {
  std::vector<SelectionVector> out(bags.size());
  parallel_for(bags.size(), [&](std::size_t i) {
    const Eigen::VectorXd pos = bags[i].positive.transpose() * w;
    const Eigen::VectorXd neg = bags[i].negative.transpose() * w;
    Eigen::Index best = 0;
    double best_q = summed_slack(pos[0], neg);
    for (Eigen::Index j = 1; j < pos.size(); ++j) {
      const double q = summed_slack(pos[j], neg);
      if (q < best_q) {
        best_q = q;
        best = j;
      }
    }
    out[i] = SelectionVector::single(best);
  });
  return out;
}

std::vector<double> quality_scores(const Eigen::VectorXd& w, const InstanceBags& bag) {
  const Eigen::VectorXd pos = bag.positive.transpose() * w;
  const Eigen::VectorXd neg = bag.negative.transpose() * w;
  std::vector<double> gamma(static_cast<std::size_t>(pos.size()), 0.0);
  for (Eigen::Index j = 0; j < pos.size(); ++j)
    for (double xi : compute_slacks(pos[j], neg)) gamma[j] += 1.0 - xi;
  return gamma;
}

std::vector<SelectionVector> select_topk(const Eigen::VectorXd& w, std::span<const InstanceBags> bags, int k) {
  if (k < 1) throw Error(ErrorKind::ConfigError, "top-k selection needs k >= 1");
  std::vector<SelectionVector> out(bags.size());
  parallel_for(bags.size(), [&](std::size_t i) {
    const auto gamma = quality_scores(w, bags[i]);
    std::vector<Eigen::Index> order(gamma.size());
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index l, Eigen::Index r) { return gamma[l] > gamma[r]; });
    order.resize(std::min<std::size_t>(order.size(), static_cast<std::size_t>(k)));
    out[i] = SelectionVector{std::move(order), false};
  });
  return out;
}

}  // namespace dvr::ranker
