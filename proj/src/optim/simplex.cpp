#include "simplex.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace umpclear::optim::detail {

namespace {

constexpr double kFeasTol = Tolerances::feasibility;
constexpr double kDualTol = 1e-9;
constexpr double kPivotTol = Tolerances::pivot;

}  // namespace

Simplex::Simplex(const LinearModel& model, LpOptions options)
    : opt_(options), m_(model.num_constraints()), n_(model.num_variables()), a_(model.matrix()) {
  const int nt = n_ + m_;
  cost_ = Eigen::VectorXd::Zero(nt);
  lo_.resize(nt);
  up_.resize(nt);
  for (int j = 0; j < n_; ++j) {
    const auto& v = model.variable(j);
    cost_[j] = v.cost;
    lo_[j] = v.lower;
    up_[j] = v.upper;
  }
  for (int i = 0; i < m_; ++i) {
    const auto& row = model.constraint(i);
    lo_[n_ + i] = row.sense == Sense::LessEqual ? -kInf : row.rhs;
    up_[n_ + i] = row.sense == Sense::GreaterEqual ? kInf : row.rhs;
  }
  head_.resize(m_);
  pos_.assign(nt, -1);
  state_.assign(nt, VarState::AtLower);
  x_ = Eigen::VectorXd::Zero(nt);
  d_ = Eigen::VectorXd::Zero(nt);
  y_ = Eigen::VectorXd::Zero(m_);
  for (int i = 0; i < m_; ++i) {
    head_[i] = n_ + i;
    pos_[n_ + i] = i;
    state_[n_ + i] = VarState::Basic;
  }
  for (int j = 0; j < n_; ++j) place_nonbasic(j);
}

void Simplex::place_nonbasic(int j) {
  const bool lo_fin = std::isfinite(lo_[j]);
  const bool up_fin = std::isfinite(up_[j]);
  if (state_[j] == VarState::AtUpper && up_fin) {
    x_[j] = up_[j];
  } else if (lo_fin) {
    state_[j] = VarState::AtLower;
    x_[j] = lo_[j];
  } else if (up_fin) {
    state_[j] = VarState::AtUpper;
    x_[j] = up_[j];
  } else {
    state_[j] = VarState::Free;
    x_[j] = 0.0;
  }
}

void Simplex::set_structural_bounds(int j, double lower, double upper) {
  lo_[j] = lower;
  up_[j] = upper;
  if (state_[j] != VarState::Basic) place_nonbasic(j);
}

void Simplex::set_basis(const Basis& basis) {
  if (basis.head == head_ && basis.state == state_) return;
  head_ = basis.head;
  state_ = basis.state;
  std::fill(pos_.begin(), pos_.end(), -1);
  for (int k = 0; k < m_; ++k) pos_[head_[k]] = k;
  for (int j = 0; j < n_ + m_; ++j)
    if (state_[j] != VarState::Basic) place_nonbasic(j);
  factored_ = false;
}

void Simplex::refactor() {
  etas_.clear();
  if (m_ == 0) {
    factored_ = true;
    return;
  }
  for (int attempt = 0; attempt < 2; ++attempt) {
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<size_t>(m_) * 4);
    for (int k = 0; k < m_; ++k) {
      const int j = head_[k];
      if (j < n_) {
        for (SpMat::InnerIterator it(a_, j); it; ++it) trip.emplace_back(it.row(), k, it.value());
      } else {
        trip.emplace_back(j - n_, k, -1.0);
      }
    }
    SpMat b(m_, m_);
    b.setFromTriplets(trip.begin(), trip.end());
    b.makeCompressed();
    lu_.analyzePattern(b);
    lu_.factorize(b);
    if (lu_.info() == Eigen::Success) {
      factored_ = true;
      return;
    }
    // Singular basis: fall back to the all-logical basis.
    for (int j = 0; j < n_; ++j) {
      if (state_[j] == VarState::Basic) state_[j] = VarState::AtLower;
      pos_[j] = -1;
    }
    for (int i = 0; i < m_; ++i) {
      head_[i] = n_ + i;
      pos_[n_ + i] = i;
      state_[n_ + i] = VarState::Basic;
    }
    for (int j = 0; j < n_; ++j) place_nonbasic(j);
  }
  throw SolverError("simplex: basis factorization failed");
}

void Simplex::ftran(Eigen::VectorXd& v) const {
  if (m_ == 0) return;
  v = lu_.solve(v);
  for (const auto& e : etas_) {
    const double zr = v[e.row] / e.pivot;
    if (zr != 0.0)
      for (size_t k = 0; k < e.index.size(); ++k) v[e.index[k]] -= e.value[k] * zr;
    v[e.row] = zr;
  }
}

void Simplex::btran(Eigen::VectorXd& v) const {
  if (m_ == 0) return;
  for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
    double s = v[it->row];
    for (size_t k = 0; k < it->index.size(); ++k) s -= it->value[k] * v[it->index[k]];
    v[it->row] = s / it->pivot;
  }
  v = lu_.transpose().solve(v);
}

void Simplex::load_column(int j, Eigen::VectorXd& out) const {
  out.setZero(m_);
  if (j < n_) {
    for (SpMat::InnerIterator it(a_, j); it; ++it) out[it.row()] = it.value();
  } else {
    out[j - n_] = -1.0;
  }
}

double Simplex::column_dot(int j, const Eigen::VectorXd& v) const {
  if (j >= n_) return -v[j - n_];
  double s = 0.0;
  for (SpMat::InnerIterator it(a_, j); it; ++it) s += it.value() * v[it.row()];
  return s;
}

void Simplex::compute_primal() {
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m_);
  for (int j = 0; j < n_ + m_; ++j) {
    if (state_[j] == VarState::Basic || x_[j] == 0.0) continue;
    if (j < n_) {
      for (SpMat::InnerIterator it(a_, j); it; ++it) rhs[it.row()] += it.value() * x_[j];
    } else {
      rhs[j - n_] -= x_[j];
    }
  }
  ftran(rhs);
  for (int k = 0; k < m_; ++k) x_[head_[k]] = -rhs[k];
}

void Simplex::compute_duals(const Eigen::VectorXd& cost) {
  Eigen::VectorXd cb(m_);
  for (int k = 0; k < m_; ++k) cb[k] = cost[head_[k]];
  btran(cb);
  y_ = cb;
  for (int j = 0; j < n_ + m_; ++j)
    d_[j] = state_[j] == VarState::Basic ? 0.0 : cost[j] - column_dot(j, y_);
}

bool Simplex::make_dual_feasible() {
  bool flipped = false;
  for (int j = 0; j < n_ + m_; ++j) {
    if (state_[j] == VarState::Basic || lo_[j] == up_[j]) continue;
    switch (state_[j]) {
      case VarState::AtLower:
        if (d_[j] < -kDualTol) {
          if (!std::isfinite(up_[j])) return false;
          state_[j] = VarState::AtUpper;
          x_[j] = up_[j];
          flipped = true;
        }
        break;
      case VarState::AtUpper:
        if (d_[j] > kDualTol) {
          if (!std::isfinite(lo_[j])) return false;
          state_[j] = VarState::AtLower;
          x_[j] = lo_[j];
          flipped = true;
        }
        break;
      case VarState::Free:
        if (std::abs(d_[j]) > kDualTol) return false;
        break;
      case VarState::Basic:
        break;
    }
  }
  if (flipped) compute_primal();
  return true;
}

double Simplex::infeasibility(int j) const {
  if (x_[j] < lo_[j] - kFeasTol) return lo_[j] - x_[j];
  if (x_[j] > up_[j] + kFeasTol) return x_[j] - up_[j];
  return 0.0;
}

void Simplex::bump_iteration() {
  if (++iterations_ - solve_start_ > opt_.max_iterations)
    throw SolverError("simplex: iteration limit " + std::to_string(opt_.max_iterations) +
                      " exceeded");
}

void Simplex::pivot(int r, int q, const Eigen::VectorXd& alpha_q) {
  const int leave = head_[r];
  head_[r] = q;
  pos_[q] = r;
  pos_[leave] = -1;
  state_[q] = VarState::Basic;
  Eta eta;
  eta.row = r;
  eta.pivot = alpha_q[r];
  for (int k = 0; k < m_; ++k) {
    if (k == r || std::abs(alpha_q[k]) < 1e-14) continue;
    eta.index.push_back(k);
    eta.value.push_back(alpha_q[k]);
  }
  etas_.push_back(std::move(eta));
}

SolveStatus Simplex::solve() {
  infeasible_row_ = -1;
  solve_start_ = iterations_;
  if (!factored_) refactor();
  compute_primal();
  for (int round = 0; round < 6; ++round) {
    compute_duals(cost_);
    Outcome out = Outcome::Fallback;
    if (make_dual_feasible()) out = dual_simplex();
    if (out == Outcome::Fallback) out = primal_simplex();
    if (out == Outcome::Infeasible) return SolveStatus::Infeasible;
    if (out == Outcome::Unbounded) return SolveStatus::Unbounded;
    // Verify; refresh the factors first once the eta file is long.
    if (etas_.size() > 25) refactor();
    compute_primal();
    compute_duals(cost_);
    double pinf = 0.0;
    double dinf = 0.0;
    for (int k = 0; k < m_; ++k) pinf = std::max(pinf, infeasibility(head_[k]));
    for (int j = 0; j < n_ + m_; ++j) {
      if (state_[j] == VarState::AtLower && lo_[j] != up_[j]) dinf = std::max(dinf, -d_[j]);
      if (state_[j] == VarState::AtUpper && lo_[j] != up_[j]) dinf = std::max(dinf, d_[j]);
      if (state_[j] == VarState::Free) dinf = std::max(dinf, std::abs(d_[j]));
    }
    if (pinf <= kFeasTol && dinf <= Tolerances::duality * 1e-1) return SolveStatus::Optimal;
  }
  throw SolverError("simplex: failed to reach a verified optimal basis");
}

Simplex::Outcome Simplex::dual_simplex() {
  const int nt = n_ + m_;
  Eigen::VectorXd rho(m_), alpha_q(m_), alpha_row = Eigen::VectorXd::Zero(nt);
  std::vector<int> eligible;
  eligible.reserve(nt);
  int degenerate = 0;
  bool bland = false;
  for (;;) {
    if (static_cast<int>(etas_.size()) >= opt_.refactor_interval) {
      refactor();
      compute_primal();
      compute_duals(cost_);
      if (!make_dual_feasible()) return Outcome::Fallback;
    }
    int r = -1;
    double worst = kFeasTol;
    for (int k = 0; k < m_; ++k) {
      const double inf = infeasibility(head_[k]);
      if (bland ? inf > 0.0 && (r < 0 || head_[k] < head_[r]) : inf > worst) {
        worst = inf;
        r = k;
      }
    }
    if (r < 0) return Outcome::Optimal;
    bump_iteration();

    const int leave = head_[r];
    const bool to_lower = x_[leave] < lo_[leave];
    rho.setZero();
    rho[r] = 1.0;
    btran(rho);

    // Harris two-pass ratio test on the pivot row.
    eligible.clear();
    double theta_max = kInf;
    for (int j = 0; j < nt; ++j) {
      if (state_[j] == VarState::Basic || lo_[j] == up_[j]) continue;
      const double a = column_dot(j, rho);
      alpha_row[j] = a;
      bool ok = false;
      switch (state_[j]) {
        case VarState::AtLower: ok = to_lower ? a < -kPivotTol : a > kPivotTol; break;
        case VarState::AtUpper: ok = to_lower ? a > kPivotTol : a < -kPivotTol; break;
        case VarState::Free: ok = std::abs(a) > kPivotTol; break;
        case VarState::Basic: break;
      }
      if (!ok) continue;
      eligible.push_back(j);
      theta_max = std::min(theta_max, (std::abs(d_[j]) + (bland ? 0.0 : kDualTol)) / std::abs(a));
    }
    if (eligible.empty()) {
      infeasible_row_ = r;
      farkas_ = to_lower ? Eigen::VectorXd(rho) : Eigen::VectorXd(-rho);
      return Outcome::Infeasible;
    }
    int q = -1;
    double best_alpha = 0.0;
    for (int j : eligible) {
      const double a = std::abs(alpha_row[j]);
      const double ratio = (state_[j] == VarState::Free ? std::abs(d_[j]) : std::max(0.0, std::abs(d_[j]))) / a;
      if (bland) {
        // smallest index among the (near) minimum ratios
        if (ratio <= theta_max * (1.0 + 1e-9) + 1e-12 && q < 0) q = j;
      } else if (ratio <= theta_max && a > best_alpha) {
        best_alpha = a;
        q = j;
      }
    }
    const double alpha_rq = alpha_row[q];

    load_column(q, alpha_q);
    ftran(alpha_q);
    if (std::abs(alpha_q[r] - alpha_rq) > 1e-7 * (1.0 + std::abs(alpha_rq)) ||
        std::abs(alpha_q[r]) < kPivotTol) {
      if (etas_.empty()) return Outcome::Fallback;  // fresh factors disagree: let primal take over
      refactor();
      compute_primal();
      compute_duals(cost_);
      if (!make_dual_feasible()) return Outcome::Fallback;
      continue;
    }

    const double theta_d = d_[q] / alpha_rq;
    for (int j = 0; j < nt; ++j)
      if (state_[j] != VarState::Basic && lo_[j] != up_[j]) d_[j] -= theta_d * alpha_row[j];

    const double target = to_lower ? lo_[leave] : up_[leave];
    const double delta_q = (x_[leave] - target) / alpha_q[r];
    for (int k = 0; k < m_; ++k) x_[head_[k]] -= delta_q * alpha_q[k];
    x_[q] += delta_q;
    x_[leave] = target;

    pivot(r, q, alpha_q);
    state_[leave] = (to_lower || lo_[leave] == up_[leave]) ? VarState::AtLower : VarState::AtUpper;
    d_[leave] = -theta_d;
    d_[q] = 0.0;
    if (std::abs(theta_d) < 1e-12) {
      if (++degenerate > opt_.degenerate_limit) bland = true;
    } else {
      degenerate = 0;
      bland = false;
    }
  }
}

Simplex::Outcome Simplex::primal_simplex() {
  const int nt = n_ + m_;
  Eigen::VectorXd pcost(nt), alpha(m_);
  int degenerate = 0;
  bool bland = false;
  for (;;) {
    if (static_cast<int>(etas_.size()) >= opt_.refactor_interval) {
      refactor();
      compute_primal();
    }
    bool phase1 = false;
    pcost.setZero();
    for (int k = 0; k < m_; ++k) {
      const int j = head_[k];
      if (x_[j] < lo_[j] - kFeasTol) {
        pcost[j] = -1.0;
        phase1 = true;
      } else if (x_[j] > up_[j] + kFeasTol) {
        pcost[j] = 1.0;
        phase1 = true;
      }
    }
    if (!phase1) pcost = cost_;
    compute_duals(pcost);

    int q = -1;
    double best = kDualTol;
    for (int j = 0; j < nt; ++j) {
      if (state_[j] == VarState::Basic || lo_[j] == up_[j]) continue;
      double score = 0.0;
      if (state_[j] == VarState::AtLower) score = -d_[j];
      else if (state_[j] == VarState::AtUpper) score = d_[j];
      else score = std::abs(d_[j]);
      if (score > best) {
        best = score;
        q = j;
        if (bland) break;
      }
    }
    if (q < 0) {
      if (phase1) {
        farkas_ = -y_;
        return Outcome::Infeasible;
      }
      return Outcome::Optimal;
    }
    bump_iteration();
    const double dir = d_[q] < 0.0 ? 1.0 : -1.0;
    load_column(q, alpha);
    ftran(alpha);

    const double t_flip = (std::isfinite(lo_[q]) && std::isfinite(up_[q])) ? up_[q] - lo_[q] : kInf;
    // Harris pass 1: relaxed step bound. Each limiting row also reports the
    // bound its basic variable leaves at.
    struct Limit {
      double t = kInf;
      bool at_lower = true;
    };
    auto limit = [&](int k, double slack_tol) -> Limit {
      const int j = head_[k];
      const double rate = -dir * alpha[k];
      if (std::abs(rate) <= kPivotTol) return {};
      const bool below = phase1 && x_[j] < lo_[j] - kFeasTol;
      const bool above = phase1 && x_[j] > up_[j] + kFeasTol;
      if (below) return rate > 0.0 ? Limit{(lo_[j] - x_[j] + slack_tol) / rate, true} : Limit{};
      if (above) return rate < 0.0 ? Limit{(x_[j] - up_[j] + slack_tol) / -rate, false} : Limit{};
      if (rate < 0.0 && std::isfinite(lo_[j]))
        return {std::max(0.0, x_[j] - lo_[j] + slack_tol) / -rate, true};
      if (rate > 0.0 && std::isfinite(up_[j]))
        return {std::max(0.0, up_[j] - x_[j] + slack_tol) / rate, false};
      return {};
    };
    double t_relaxed = kInf;
    for (int k = 0; k < m_; ++k) t_relaxed = std::min(t_relaxed, limit(k, bland ? 0.0 : kFeasTol).t);
    int r = -1;
    double t = kInf;
    bool leave_lower = true;
    double best_rate = 0.0;
    for (int k = 0; k < m_; ++k) {
      const Limit lk = limit(k, 0.0);
      if (lk.t == kInf || lk.t > t_relaxed) continue;
      const double rate = std::abs(alpha[k]);
      const bool take = bland ? (lk.t < t || (lk.t == t && head_[k] < head_[r])) : rate > best_rate;
      if (take) {
        best_rate = rate;
        r = k;
        t = lk.t;
        leave_lower = lk.at_lower;
      }
    }
    if (r < 0 && t_flip == kInf) {
      if (phase1) throw SolverError("simplex: unbounded phase-1 direction");
      return Outcome::Unbounded;
    }
    if (t_flip <= t) {
      // Entering variable moves to its opposite bound; basis unchanged.
      for (int k = 0; k < m_; ++k) x_[head_[k]] -= dir * alpha[k] * t_flip;
      state_[q] = state_[q] == VarState::AtLower ? VarState::AtUpper : VarState::AtLower;
      x_[q] = state_[q] == VarState::AtLower ? lo_[q] : up_[q];
      degenerate = 0;
      bland = false;
      continue;
    }
    t = std::max(0.0, t);
    const int leave = head_[r];
    for (int k = 0; k < m_; ++k) x_[head_[k]] -= dir * alpha[k] * t;
    x_[q] += dir * t;
    x_[leave] = leave_lower ? lo_[leave] : up_[leave];
    pivot(r, q, alpha);
    state_[leave] = (leave_lower || lo_[leave] == up_[leave]) ? VarState::AtLower : VarState::AtUpper;
    if (t < 1e-12) {
      if (++degenerate > opt_.degenerate_limit) bland = true;
    } else {
      degenerate = 0;
      bland = false;
    }
  }
}

double Simplex::objective() const { return cost_.head(n_).dot(x_.head(n_)); }

void Simplex::export_result(SolveStatus status, SolveResult& out) const {
  out.status = status;
  out.iterations = iterations_;
  out.primal = x_.head(n_);
  out.objective = objective();
  out.duals = y_;
  out.reduced_costs = d_.head(n_);
  if (status == SolveStatus::Infeasible) out.farkas = farkas_;
}

}  // namespace umpclear::optim::detail
