#include <cmath>

#include "dvr/ranker.hpp"

namespace dvr::ranker {

RankingProblem::RankingProblem(std::span<const InstanceBags> bags, std::span<const SelectionVector> selections,
                               double C)
    : c_(C) {
  if (bags.size() != selections.size())
    throw Error(ErrorKind::ShapeError, "one selection per person is required");
  if (bags.empty()) throw Error(ErrorKind::InsufficientData, "no bags to rank");
  if (!(C > 0.0)) throw Error(ErrorKind::ConfigError, "C must be positive");

  const Eigen::Index dim = bags.front().dim();
  Eigen::Index anchor_count = 0;
  Eigen::Index negative_count = 0;
  for (std::size_t i = 0; i < bags.size(); ++i) {
    if (bags[i].dim() != dim || bags[i].negative.rows() != dim)
      throw Error(ErrorKind::ShapeError, "bags disagree on descriptor length");
    if (bags[i].positive.cols() == 0) throw Error(ErrorKind::ShapeError, "empty positive bag for " + bags[i].person);
    anchor_count += selections[i].uniform ? 1 : static_cast<Eigen::Index>(selections[i].chosen.size());
    negative_count += bags[i].negative.cols();
  }

  anchors_.resize(dim, anchor_count);
  negatives_.resize(dim, negative_count);
  Eigen::Index a = 0;
  Eigen::Index n = 0;
  for (std::size_t i = 0; i < bags.size(); ++i) {
    Group g{a, a, n, n};
    const std::size_t slots = selections[i].uniform ? 1 : selections[i].chosen.size();
    for (std::size_t s = 0; s < slots; ++s)
      anchors_.col(a++) = selection_anchor(bags[i], selections[i], static_cast<Eigen::Index>(s));
    negatives_.middleCols(n, bags[i].negative.cols()) = bags[i].negative;
    n += bags[i].negative.cols();
    g.anchor_end = a;
    g.negative_end = n;
    groups_.push_back(g);
  }
  if (!anchors_.allFinite() || !negatives_.allFinite())
    throw Error(ErrorKind::NumericalError, "non-finite feature values in ranking constraints");
}

std::size_t RankingProblem::constraint_count() const {
  std::size_t c = 0;
  for (const Group& g : groups_)
    c += static_cast<std::size_t>((g.anchor_end - g.anchor_begin) * (g.negative_end - g.negative_begin));
  return c;
}

std::vector<double> RankingProblem::margins(const Eigen::VectorXd& w) const {
  const Eigen::VectorXd sa = anchors_.transpose() * w;
  const Eigen::VectorXd sn = negatives_.transpose() * w;
  std::vector<double> out;
  out.reserve(constraint_count());
  for (const Group& g : groups_)
    for (Eigen::Index a = g.anchor_begin; a < g.anchor_end; ++a)
      for (Eigen::Index n = g.negative_begin; n < g.negative_end; ++n) out.push_back(sa[a] - sn[n]);
  return out;
}

double RankingProblem::objective(const Eigen::VectorXd& w) const {
  double loss = 0.0;
  for (double m : margins(w)) {
    const double r = 1.0 - m;
    if (r > 0.0) loss += r * r;
  }
  return 0.5 * w.squaredNorm() + c_ * loss;
}

Eigen::VectorXd RankingProblem::gradient(const Eigen::VectorXd& w) const {
  const Eigen::VectorXd sa = anchors_.transpose() * w;
  const Eigen::VectorXd sn = negatives_.transpose() * w;
  Eigen::VectorXd alpha = Eigen::VectorXd::Zero(anchors_.cols());
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(negatives_.cols());
  for (const Group& g : groups_)
    for (Eigen::Index a = g.anchor_begin; a < g.anchor_end; ++a)
      for (Eigen::Index n = g.negative_begin; n < g.negative_end; ++n) {
        const double r = 1.0 - sa[a] + sn[n];
        if (r > 0.0) {
          alpha[a] += r;
          beta[n] += r;
        }
      }
  return w - 2.0 * c_ * (anchors_ * alpha - negatives_ * beta);
}

Eigen::VectorXd RankingProblem::hessian_times(const Eigen::VectorXd& w, const Eigen::VectorXd& v) const {
  const Eigen::VectorXd sa = anchors_.transpose() * w;
  const Eigen::VectorXd sn = negatives_.transpose() * w;
  const Eigen::VectorXd ta = anchors_.transpose() * v;
  const Eigen::VectorXd tn = negatives_.transpose() * v;
  Eigen::VectorXd alpha = Eigen::VectorXd::Zero(anchors_.cols());
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(negatives_.cols());
  for (const Group& g : groups_)
    for (Eigen::Index a = g.anchor_begin; a < g.anchor_end; ++a)
      for (Eigen::Index n = g.negative_begin; n < g.negative_end; ++n) {
        if (1.0 - sa[a] + sn[n] > 0.0) {
          const double delta = ta[a] - tn[n];
          alpha[a] += delta;
          beta[n] += delta;
        }
      }
  return v + 2.0 * c_ * (anchors_ * alpha - negatives_ * beta);
}

namespace {

Eigen::VectorXd conjugate_gradient(const RankingProblem& problem, const Eigen::VectorXd& w, const Eigen::VectorXd& b,
                                   const SolverOptions& options) {
  Eigen::VectorXd x = Eigen::VectorXd::Zero(b.size());
  Eigen::VectorXd r = b;
  Eigen::VectorXd p = r;
  double rs = r.squaredNorm();
  const double stop = options.cg_relative_tolerance * std::sqrt(rs);
  for (int it = 0; it < options.max_cg_iterations && std::sqrt(rs) > stop; ++it) {
    const Eigen::VectorXd hp = problem.hessian_times(w, p);
    const double alpha = rs / p.dot(hp);
    x += alpha * p;
    r -= alpha * hp;
    const double rs_next = r.squaredNorm();
    p = r + (rs_next / rs) * p;
    rs = rs_next;
  }
  return x;
}

// Exact minimization of the convex piecewise quadratic t -> F(w + t d).
double line_search(const RankingProblem& problem, const Eigen::VectorXd& w, const Eigen::VectorXd& d) {
  const auto m = problem.margins(w);
  const auto delta = problem.margins(d);
  const double wd = w.dot(d);
  const double dd = d.dot(d);
  const double c2 = 2.0 * problem.C();
  double t = 0.0;
  for (int it = 0; it < 100; ++it) {
    double first = wd + t * dd;
    double second = dd;
    for (std::size_t c = 0; c < m.size(); ++c) {
      const double r = 1.0 - m[c] - t * delta[c];
      if (r > 0.0) {
        first -= c2 * r * delta[c];
        second += c2 * delta[c] * delta[c];
      }
    }
    const double step = first / second;
    t -= step;
    if (std::abs(step) <= 1e-12 * std::max(1.0, std::abs(t))) break;
  }
  return t;
}

}  // namespace

SolverResult solve_rank_svm(const RankingProblem& problem, const SolverOptions& options,
                            const Eigen::VectorXd& start) {
  SolverResult result;
  result.w = start.size() == problem.dim() ? start : Eigen::VectorXd::Zero(problem.dim());

  for (int step = 0; step < options.max_newton_steps; ++step) {
    const double f = problem.objective(result.w);
    result.objective_trace.push_back(f);
    const Eigen::VectorXd g = problem.gradient(result.w);
    result.gradient_norm = g.norm();
    if (result.gradient_norm < options.tolerance) {
      result.converged = true;
      return result;
    }

    const Eigen::VectorXd d = conjugate_gradient(problem, result.w, -g, options);
    double t = line_search(problem, result.w, d);
    Eigen::VectorXd next = result.w + t * d;
    double f_next = problem.objective(next);
    for (int halving = 0; !(f_next <= f) && halving < 60; ++halving) {
      t = halving == 0 ? 1.0 : 0.5 * t;
      next = result.w + t * d;
      f_next = problem.objective(next);
    }
    if (!(f_next <= f)) break;  // no descent possible at this precision
    if (!next.allFinite()) throw Error(ErrorKind::NumericalError, "solver diverged");
    result.w = std::move(next);
    ++result.newton_steps;
  }

  result.objective_trace.push_back(problem.objective(result.w));
  result.gradient_norm = problem.gradient(result.w).norm();
  result.converged = result.gradient_norm < options.tolerance;
  return result;
}

SolverResult ranking_step(std::span<const InstanceBags> bags, std::span<const SelectionVector> selections, double C,
                          const SolverOptions& options, const Eigen::VectorXd& start) {
  const RankingProblem problem(bags, selections, C);
  return solve_rank_svm(problem, options, start);
}

}  // namespace dvr::ranker
