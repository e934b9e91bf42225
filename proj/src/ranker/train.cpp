#include "dvr/ranker.hpp"

namespace dvr::ranker {

namespace {

double total_cost(const Eigen::VectorXd& w, std::span<const InstanceBags> bags,
                  std::span<const SelectionVector> selections) {
  double q = 0.0;
  for (std::size_t i = 0; i < bags.size(); ++i) q += selection_cost(w, bags[i], selections[i]);
  return q;
}

bool unchanged(std::span<const SelectionVector> lhs, std::span<const SelectionVector> rhs) {
  for (std::size_t i = 0; i < lhs.size(); ++i)
    if (!same_selection(lhs[i], rhs[i])) return false;
  return true;
}

}  // namespace

RankModel train_dvr(std::span<const InstanceBags> bags, const TrainOptions& options) {
  if (bags.size() < 2) throw Error(ErrorKind::InsufficientData, "training needs at least 2 persons");
  if (options.k < 1) throw Error(ErrorKind::ConfigError, "k must be >= 1");
  if (options.max_iters < 1) throw Error(ErrorKind::ConfigError, "max_iters must be >= 1");

  const bool single = options.rule == SelectionRule::Single ||
                      (options.rule == SelectionRule::Auto && options.k == 1);

  RankModel model;
  model.C = options.C;
  model.k = options.k;

  std::vector<SelectionVector> selections(bags.size(), SelectionVector::average());
  Eigen::VectorXd w = Eigen::VectorXd::Zero(bags.front().dim());

  for (int it = 1; it <= options.max_iters; ++it) {
    const RankingProblem problem(bags, selections, options.C);
    const SolverResult solved = solve_rank_svm(problem, options.solver, w);
    w = solved.w;

    auto fresh = single ? selecting_step_single(w, bags) : select_topk(w, bags, options.k);

    IterationRecord rec;
    rec.iteration = it;
    rec.objective = solved.objective_trace.back();
    rec.newton_steps = solved.newton_steps;
    rec.constraints = problem.constraint_count();
    rec.cost_before = total_cost(w, bags, selections);
    rec.cost_after = total_cost(w, bags, fresh);
    rec.selections = fresh;
    model.history.push_back(std::move(rec));
    model.iterations = it;

    const bool done = unchanged(selections, fresh);
    selections = std::move(fresh);
    if (done) {
      model.converged = true;
      break;
    }
  }

  model.w = std::move(w);
  model.selections = std::move(selections);
  return model;
}

}  // namespace dvr::ranker
