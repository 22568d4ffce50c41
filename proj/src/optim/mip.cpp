#include "umpclear/optim/solve.hpp"

#include "simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace umpclear::optim {

namespace {

struct BoundChange {
  int var;
  double lower;
  double upper;
};

struct Node {
  double bound;
  long id;
  std::vector<BoundChange> changes;
  detail::Basis basis;
};

struct WorseBound {
  bool operator()(const Node& a, const Node& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;
    return a.id > b.id;
  }
};

// Most fractional integer column of the highest priority class that has
// one, lowest index on ties; -1 when integral.
int pick_branch(const LinearModel& model, const Eigen::VectorXd& x) {
  int best = -1;
  double best_frac = Tolerances::integrality;
  for (int j = 0; j < model.num_variables(); ++j) {
    const auto& v = model.variable(j);
    if (!v.is_integer) continue;
    const double f = x[j] - std::floor(x[j]);
    const double dist = std::min(f, 1.0 - f);
    if (dist <= Tolerances::integrality) continue;
    const int prio = best < 0 ? 0 : model.variable(best).priority;
    if (best < 0 || v.priority > prio || (v.priority == prio && dist > best_frac + 1e-12)) {
      best_frac = dist;
      best = j;
    }
  }
  return best;
}

}  // namespace

SolveResult solve_mip(const LinearModel& model, const MipOptions& options) {
  if (!model.has_integers()) return solve_lp(model, options.lp);

  detail::Simplex lp(model, options.lp);
  const int n = model.num_variables();
  std::vector<int> ints;
  for (int j = 0; j < n; ++j)
    if (model.variable(j).is_integer) ints.push_back(j);

  auto apply = [&](const std::vector<BoundChange>& changes) {
    for (int j : ints) {
      const auto& v = model.variable(j);
      lp.set_structural_bounds(j, std::ceil(v.lower - Tolerances::integrality),
                               std::floor(v.upper + Tolerances::integrality));
    }
    for (const auto& c : changes) lp.set_structural_bounds(c.var, c.lower, c.upper);
  };

  std::optional<Eigen::VectorXd> incumbent;
  double best = std::numeric_limits<double>::infinity();
  long nodes = 0;
  long next_id = 0;
  long iterations = 0;
  std::vector<Node> open;

  auto prunable = [&](double bound) {
    if (!incumbent) return false;
    return bound >= best - options.gap_tol * std::max(1.0, std::abs(best));
  };

  // Nonbasic integer columns whose reduced cost alone closes the gap stay
  // at their bound for the whole subtree.
  auto fix_by_reduced_cost = [&](double obj, std::vector<BoundChange>& changes) {
    const double cutoff = best - options.gap_tol * std::max(1.0, std::abs(best));
    for (int j : ints) {
      const double lo = lp.structural_lower(j), hi = lp.structural_upper(j);
      if (lo == hi) continue;
      const double d = lp.reduced_cost(j);
      if (lp.state(j) == detail::VarState::AtLower && d > 0 && obj + d * (hi - lo) >= cutoff) {
        changes.push_back({j, lo, lo});
        lp.set_structural_bounds(j, lo, lo);
      } else if (lp.state(j) == detail::VarState::AtUpper && d < 0 && obj - d * (hi - lo) >= cutoff) {
        changes.push_back({j, hi, hi});
        lp.set_structural_bounds(j, hi, hi);
      }
    }
  };

  // Depth-first dive from the node whose bounds are currently loaded.
  auto dive = [&](std::vector<BoundChange> changes) {
    for (;;) {
      if (nodes >= options.node_limit) {
        std::optional<SolveResult> inc;
        if (incumbent) {
          SolveResult r;
          r.status = SolveStatus::Optimal;
          r.primal = *incumbent;
          r.objective = model.evaluate(*incumbent);
          r.nodes = nodes;
          inc = r;
        }
        throw NodeLimitError("branch and bound: node limit " + std::to_string(options.node_limit) +
                                 " reached",
                             inc);
      }
      ++nodes;
      const SolveStatus st = lp.solve();
      iterations = lp.iterations();
      if (st == SolveStatus::Unbounded) throw SolverError("branch and bound: LP relaxation unbounded");
      if (st == SolveStatus::Infeasible) return;
      const double obj = lp.objective() + model.objective_constant();
      if (prunable(obj)) return;
      if (incumbent) fix_by_reduced_cost(obj, changes);
      const Eigen::VectorXd x = lp.structural_values();
      const int j = pick_branch(model, x);
      if (j < 0) {
        if (obj < best) {
          best = obj;
          incumbent = x;
        }
        return;
      }
      const double fl = std::floor(x[j]);
      const bool up_first = x[j] - fl >= 0.5;
      const double lo = lp.structural_lower(j);
      const double hi = lp.structural_upper(j);
      BoundChange down{j, lo, fl};
      BoundChange up{j, fl + 1.0, hi};
      Node other{obj, next_id++, changes, lp.basis()};
      other.changes.push_back(up_first ? down : up);
      open.push_back(std::move(other));
      const BoundChange& here = up_first ? up : down;
      changes.push_back(here);
      lp.set_structural_bounds(here.var, here.lower, here.upper);
    }
  };

  apply({});
  dive({});
  while (!open.empty()) {
    // Newest node first until an incumbent exists, then best bound.
    auto pick = open.begin();
    for (auto it = open.begin(); it != open.end(); ++it) {
      if (incumbent ? WorseBound{}(*pick, *it) : it->id > pick->id) pick = it;
    }
    Node node = std::move(*pick);
    *pick = std::move(open.back());
    open.pop_back();
    if (prunable(node.bound)) continue;
    apply(node.changes);
    lp.set_basis(node.basis);
    dive(std::move(node.changes));
  }

  if (!incumbent) {
    SolveResult r;
    r.status = SolveStatus::Infeasible;
    r.nodes = nodes;
    r.iterations = iterations;
    return r;
  }

  // Re-solve with integers fixed so the result carries duals of the final dispatch.
  LinearModel fixed = model;
  for (int j : ints) {
    const double v = std::round((*incumbent)[j]);
    fixed.set_bounds(j, v, v);
  }
  SolveResult r = solve_lp(fixed, options.lp);
  if (!r.optimal()) {
    r.status = SolveStatus::Optimal;
    r.primal = *incumbent;
    r.objective = model.evaluate(*incumbent);
  }
  r.nodes = nodes;
  r.iterations += iterations;
  return r;
}

}  // namespace umpclear::optim
