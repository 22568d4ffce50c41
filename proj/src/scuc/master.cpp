#include "umpclear/scuc/master.hpp"

#include "umpclear/model/network.hpp"
#include "umpclear/storage/storage.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace umpclear {

using optim::kInf;
using optim::Sense;
using optim::Term;

namespace {

std::string tag(const char* what, int a, int b) {
  return std::string(what) + "[" + std::to_string(a) + "," + std::to_string(b + 1) + "]";
}

std::string tag(const char* what, int k, int a, int b) {
  return std::string(what) + "[" + std::to_string(k) + "," + std::to_string(a) + "," + std::to_string(b + 1) + "]";
}

// Base output P_{i,t} = p_min * I + sum of segment outputs.
void output_terms(const MasterLayout& lay, const Unit& u, int i, int t, double scale, std::vector<Term>& out) {
  out.push_back({lay.commit(i, t), scale * u.p_min});
  for (int v : lay.seg[i][t]) out.push_back({v, scale});
}

}  // namespace

MasterModel build_master(const SystemCase& c, const std::vector<PiecewiseBid<double>>& bids,
                         const std::vector<Scenario>& pool, const MasterOptions& options) {
  const int nu = static_cast<int>(c.units.size());
  const int nt = c.horizon;
  if (static_cast<int>(bids.size()) != nu) throw std::invalid_argument("build_master: one bid per unit required");
  for (const auto& s : pool)
    if (s.rows() != c.num_buses || s.cols() != nt) throw std::invalid_argument("build_master: scenario shape mismatch");
  if (options.fixed_commitment && (options.fixed_commitment->rows() != nu || options.fixed_commitment->cols() != nt))
    throw std::invalid_argument("build_master: fixed commitment shape mismatch");

  MasterModel mm;
  mm.pool = pool;
  mm.options = options;
  auto& m = mm.model;
  auto& lay = mm.layout;
  if (options.transmission) mm.sf = compute_shift_factors<double>(c.lines, c.num_buses, options.slack_bus);
  const int nl = options.transmission ? static_cast<int>(c.lines.size()) : 0;

  lay.commit.resize(nu, nt);
  lay.startup.resize(nu, nt);
  lay.shutdown.resize(nu, nt);
  lay.seg.assign(nu, std::vector<std::vector<int>>(nt));
  for (int i = 0; i < nu; ++i) {
    const auto& u = c.units[i];
    for (int t = 0; t < nt; ++t) {
      if (options.fixed_commitment) {
        const double v = (*options.fixed_commitment)(i, t);
        lay.commit(i, t) = m.add_variable(tag("I", i, t), v, v, bids[i].fixed_cost);
      } else {
        lay.commit(i, t) = m.add_binary(tag("I", i, t), bids[i].fixed_cost);
      }
      lay.startup(i, t) = m.add_variable(tag("su", i, t), 0.0, kInf, u.startup_cost);
      lay.shutdown(i, t) = m.add_variable(tag("sd", i, t), 0.0, kInf, u.shutdown_cost);
      for (size_t s = 0; s < bids[i].segments.size(); ++s) {
        const auto& seg = bids[i].segments[s];
        const int v = m.add_variable(tag("seg", i, t) + std::to_string(s), 0.0, seg.width(), seg.marginal_cost);
        lay.seg[i][t].push_back(v);
        m.add_constraint(tag("segcap", i, t) + std::to_string(s), {{v, 1.0}, {lay.commit(i, t), -seg.width()}},
                         Sense::LessEqual, 0.0);
      }
    }
  }

  // Commitment logic, minimum up/down, initial status, ramping.
  for (int i = 0; i < nu; ++i) {
    const auto& u = c.units[i];
    const double on0 = u.initially_on() ? 1.0 : 0.0;
    for (int t = 0; t < nt; ++t) {
      const int it = lay.commit(i, t);
      std::vector<Term> up{{lay.startup(i, t), 1.0}, {it, -1.0}};
      std::vector<Term> dn{{lay.shutdown(i, t), 1.0}, {it, 1.0}};
      if (t > 0) {
        up.push_back({lay.commit(i, t - 1), 1.0});
        dn.push_back({lay.commit(i, t - 1), -1.0});
      }
      m.add_constraint(tag("startup", i, t), up, Sense::GreaterEqual, t == 0 ? -on0 : 0.0);
      m.add_constraint(tag("shutdown", i, t), dn, Sense::GreaterEqual, t == 0 ? on0 : 0.0);

      std::vector<Term> minup{{it, 1.0}};
      for (int tau = std::max(0, t - u.min_on + 1); tau <= t; ++tau) minup.push_back({lay.startup(i, tau), -1.0});
      m.add_constraint(tag("minup", i, t), minup, Sense::GreaterEqual, 0.0);
      std::vector<Term> mindn{{it, 1.0}};
      for (int tau = std::max(0, t - u.min_off + 1); tau <= t; ++tau) mindn.push_back({lay.shutdown(i, tau), 1.0});
      m.add_constraint(tag("mindown", i, t), mindn, Sense::LessEqual, 1.0);
    }
    const int forced = u.initially_on() ? std::max(0, u.min_on - u.t0) : std::max(0, u.min_off + u.t0);
    for (int t = 0; t < std::min(forced, nt); ++t)
      m.add_constraint(tag("initial", i, t), {{lay.commit(i, t), 1.0}}, Sense::Equal, on0);

    for (int t = 0; t < nt; ++t) {
      // P_t - P_{t-1} <= (2 - I_{t-1} - I_t) p_min + (1 + I_{t-1} - I_t) ramp_up, symmetric down.
      std::vector<Term> up, dn;
      output_terms(lay, u, i, t, 1.0, up);
      output_terms(lay, u, i, t, -1.0, dn);
      up.push_back({lay.commit(i, t), u.p_min + u.ramp_up});
      dn.push_back({lay.commit(i, t), u.p_min - u.ramp_down});
      double rhs_up = 2.0 * u.p_min + u.ramp_up;
      double rhs_dn = 2.0 * u.p_min + u.ramp_down;
      if (t == 0) {
        rhs_up += u.p0 - on0 * u.p_min + on0 * u.ramp_up;
        rhs_dn += -u.p0 - on0 * u.p_min - on0 * u.ramp_down;
      } else {
        output_terms(lay, u, i, t - 1, -1.0, up);
        output_terms(lay, u, i, t - 1, 1.0, dn);
        up.push_back({lay.commit(i, t - 1), u.p_min - u.ramp_up});
        dn.push_back({lay.commit(i, t - 1), u.p_min + u.ramp_down});
      }
      m.add_constraint(tag("rampup", i, t), up, Sense::LessEqual, rhs_up);
      m.add_constraint(tag("rampdown", i, t), dn, Sense::LessEqual, rhs_dn);
    }
    if (options.fixed_commitment) continue;

    // Tightening: a unit is held at p_min in its startup hour and in the hour
    // before a shutdown, so those hours carry no segment output.
    const double width = u.p_max - u.p_min;
    for (int t = 0; t < nt; ++t) {
      std::vector<Term> base;
      for (int v : lay.seg[i][t]) base.push_back({v, 1.0});
      base.push_back({lay.commit(i, t), -width});
      auto su = base, sd = base;
      su.push_back({lay.startup(i, t), width});
      if (t + 1 < nt) sd.push_back({lay.shutdown(i, t + 1), width});
      if (u.min_on >= 2) {
        if (t + 1 < nt) su.push_back({lay.shutdown(i, t + 1), width});
        m.add_constraint(tag("sucap", i, t), su, Sense::LessEqual, 0.0);
      } else {
        m.add_constraint(tag("sucap", i, t), su, Sense::LessEqual, 0.0);
        if (t + 1 < nt) m.add_constraint(tag("sdcap", i, t), sd, Sense::LessEqual, 0.0);
      }
    }
  }

  // Presolve: a unit whose absence leaves the base load unservable is on.
  if (!options.fixed_commitment) {
    double total = 0.0;
    for (const auto& u : c.units) total += u.p_max;
    if (options.storage)
      for (const auto& d : c.storage) total += d.discharge_rate;
    for (int i = 0; i < nu; ++i)
      for (int t = 0; t < nt; ++t)
        if (c.load.base[t] > total - c.units[i].p_max + 1e-9) m.set_bounds(lay.commit(i, t), 1.0, 1.0);
  }

  // Base balance and directed line limits.
  lay.balance.resize(nt);
  lay.line_up = Eigen::MatrixXi::Constant(nl, nt, -1);
  lay.line_down = Eigen::MatrixXi::Constant(nl, nt, -1);
  for (int t = 0; t < nt; ++t) {
    const Eigen::VectorXd load = bus_loads(c, t);
    std::vector<Term> bal;
    for (int i = 0; i < nu; ++i) output_terms(lay, c.units[i], i, t, 1.0, bal);
    lay.balance[t] = m.add_constraint("balance[" + std::to_string(t + 1) + "]", bal, Sense::Equal, load.sum());
    for (int l = 0; l < nl; ++l) {
      std::vector<Term> f;
      for (int i = 0; i < nu; ++i) output_terms(lay, c.units[i], i, t, mm.sf(l, c.units[i].bus), f);
      const double shift = mm.sf.row(l).dot(load);
      std::vector<Term> g;
      for (const auto& x : f) g.push_back({x.var, -x.coef});
      const double cap = c.lines[l].capacity;
      lay.line_up(l, t) = m.add_constraint(tag("flow+", l, t), f, Sense::LessEqual, cap + shift);
      lay.line_down(l, t) = m.add_constraint(tag("flow-", l, t), g, Sense::LessEqual, cap - shift);
    }
  }

  // Recourse blocks.
  for (size_t kk = 0; kk < pool.size(); ++kk) {
    const int k = static_cast<int>(kk);
    const Scenario& eps = pool[kk];
    ScenarioBlock blk;
    blk.p.resize(nu, nt);
    blk.dev_up.resize(nu, nt);
    blk.dev_down.resize(nu, nt);
    blk.cap_up.resize(nu, nt);
    blk.cap_down.resize(nu, nt);
    blk.balance.resize(nt);
    blk.line_up = Eigen::MatrixXi::Constant(nl, nt, -1);
    blk.line_down = Eigen::MatrixXi::Constant(nl, nt, -1);
    for (int t = 0; t < nt; ++t) {
      for (int i = 0; i < nu; ++i) {
        const auto& u = c.units[i];
        const int p = m.add_variable(tag("p", k, i, t), -kInf, kInf);
        blk.p(i, t) = p;
        blk.cap_down(i, t) =
            m.add_constraint(tag("pmin", k, i, t), {{p, 1.0}, {lay.commit(i, t), -u.p_min}}, Sense::GreaterEqual, 0.0);
        blk.cap_up(i, t) =
            m.add_constraint(tag("pmax", k, i, t), {{p, 1.0}, {lay.commit(i, t), -u.p_max}}, Sense::LessEqual, 0.0);
        std::vector<Term> d{{p, 1.0}};
        output_terms(lay, u, i, t, -1.0, d);
        blk.dev_up(i, t) = m.add_constraint(tag("devup", k, i, t), d, Sense::LessEqual, u.ramp_up * c.dt);
        blk.dev_down(i, t) = m.add_constraint(tag("devdown", k, i, t), d, Sense::GreaterEqual, -u.ramp_down * c.dt);
      }
      const Eigen::VectorXd load = bus_loads(c, t) + eps.col(t);
      std::vector<Term> bal;
      for (int i = 0; i < nu; ++i) bal.push_back({blk.p(i, t), 1.0});
      blk.balance[t] = m.add_constraint(tag("sbalance", k, 0, t), bal, Sense::Equal, load.sum());
      for (int l = 0; l < nl; ++l) {
        std::vector<Term> f, g;
        for (int i = 0; i < nu; ++i) {
          f.push_back({blk.p(i, t), mm.sf(l, c.units[i].bus)});
          g.push_back({blk.p(i, t), -mm.sf(l, c.units[i].bus)});
        }
        const double shift = mm.sf.row(l).dot(load);
        const double cap = c.lines[l].capacity;
        blk.line_up(l, t) = m.add_constraint(tag("sflow+", k, l, t), f, Sense::LessEqual, cap + shift);
        blk.line_down(l, t) = m.add_constraint(tag("sflow-", k, l, t), g, Sense::LessEqual, cap - shift);
      }
    }
    lay.scenarios.push_back(std::move(blk));
  }

  if (options.storage)
    for (int d = 0; d < static_cast<int>(c.storage.size()); ++d) attach_storage(mm, c, d);
  return mm;
}

namespace {

// First hour whose balance or line rows need slack to become feasible.
int diagnose_infeasible_hour(const SystemCase& c, const MasterModel& mm, optim::SolverBackend& backend) {
  optim::LinearModel m = mm.model;
  for (int j = 0; j < m.num_variables(); ++j) m.set_cost(j, 0.0);
  std::vector<std::pair<int, int>> slack_hour;
  auto relax = [&](int row, int t) {
    if (row < 0) return;
    const int a = m.add_variable("slack+", 0.0, kInf, 1.0);
    const int b = m.add_variable("slack-", 0.0, kInf, 1.0);
    m.add_term(row, a, 1.0);
    m.add_term(row, b, -1.0);
    slack_hour.push_back({a, t});
    slack_hour.push_back({b, t});
  };
  const auto& lay = mm.layout;
  for (int t = 0; t < c.horizon; ++t) {
    relax(lay.balance[t], t);
    for (int l = 0; l < lay.line_up.rows(); ++l) {
      relax(lay.line_up(l, t), t);
      relax(lay.line_down(l, t), t);
    }
    for (const auto& blk : lay.scenarios) {
      relax(blk.balance[t], t);
      for (int l = 0; l < blk.line_up.rows(); ++l) {
        relax(blk.line_up(l, t), t);
        relax(blk.line_down(l, t), t);
      }
    }
  }
  auto first_slack = [&](const optim::SolveResult& r) {
    int first = -1;
    if (!r.optimal()) return first;
    for (const auto& [v, t] : slack_hour)
      if (r.primal[v] > 1e-6 && (first < 0 || t < first)) first = t;
    return first;
  };
  // Slack needed by the relaxation is needed by the MIP too.
  optim::LinearModel relaxed = m;
  for (int j = 0; j < relaxed.num_variables(); ++j) relaxed.set_integer(j, false);
  try {
    const int hour = first_slack(backend.lp(relaxed));
    if (hour >= 0) return hour;
    return first_slack(backend.mip(m, 1e-6));
  } catch (const optim::SolverError&) {
    return -1;
  }
}

}  // namespace

optim::SolveResult solve_master(const SystemCase& c, const MasterModel& m, optim::SolverBackend& backend,
                                double gap_tol) {
  optim::SolveResult r = m.model.has_integers() ? backend.mip(m.model, gap_tol) : backend.lp(m.model);
  if (r.optimal()) return r;
  if (r.status == optim::SolveStatus::Unbounded) throw optim::SolverError("master problem is unbounded");
  const int hour = diagnose_infeasible_hour(c, m, backend);
  if (hour >= 0)
    throw MasterInfeasibleError("master problem is infeasible; first infeasible hour is " + std::to_string(hour + 1),
                                hour);
  throw MasterInfeasibleError("master problem is infeasible (commitment logic, no hour-level slack cure)", -1);
}

Reserve reserve_capability(double p, int commit, const Unit& u, double dt) {
  if (commit == 0) return {};
  return {std::min(u.p_max - p, u.ramp_up * dt), -std::min(p - u.p_min, u.ramp_down * dt)};
}

RobustSchedule extract_schedule(const SystemCase& c, const MasterModel& m, const optim::SolveResult& r) {
  if (!r.optimal()) throw optim::SolverError("extract_schedule: result is not optimal");
  const auto& lay = m.layout;
  const auto& x = r.primal;
  const int nu = static_cast<int>(c.units.size());
  const int nt = c.horizon;
  RobustSchedule s;
  s.total_cost = r.objective;
  s.commitment.resize(nu, nt);
  s.dispatch.resize(nu, nt);
  s.reserve_up.resize(nu, nt);
  s.reserve_down.resize(nu, nt);
  for (int i = 0; i < nu; ++i)
    for (int t = 0; t < nt; ++t) {
      const int on = static_cast<int>(std::lround(x[lay.commit(i, t)]));
      double p = on * c.units[i].p_min;
      for (int v : lay.seg[i][t]) p += x[v];
      s.commitment(i, t) = on;
      s.dispatch(i, t) = p;
      const Reserve q = reserve_capability(p, on, c.units[i], c.dt);
      s.reserve_up(i, t) = q.up;
      s.reserve_down(i, t) = q.down;
    }
  for (const auto& blk : lay.scenarios) {
    Eigen::MatrixXd p(nu, nt);
    for (int i = 0; i < nu; ++i)
      for (int t = 0; t < nt; ++t) p(i, t) = x[blk.p(i, t)];
    s.scenario_dispatch.push_back(std::move(p));
  }
  for (const auto& sl : lay.storage) s.storage.push_back(extract_storage(m, sl, x, nt));

  const Eigen::MatrixXd sf = m.sf.rows() > 0 ? m.sf : compute_shift_factors<double>(c.lines, c.num_buses, m.options.slack_bus);
  s.base_flows.resize(static_cast<int>(c.lines.size()), nt);
  for (int t = 0; t < nt; ++t) {
    Eigen::VectorXd inj = -bus_loads(c, t);
    for (int i = 0; i < nu; ++i) inj[c.units[i].bus] += s.dispatch(i, t);
    for (size_t d = 0; d < s.storage.size(); ++d) inj[c.storage[lay.storage[d].device].bus] += s.storage[d].net_injection(t);
    s.base_flows.col(t) = sf * inj;
  }
  return s;
}

TraditionalModel build_traditional(const SystemCase& c, const std::vector<PiecewiseBid<double>>& bids,
                                   const TraditionalRequirement& req, std::optional<Eigen::MatrixXi> fixed_commitment) {
  MasterOptions o;
  o.transmission = false;
  o.storage = false;
  o.fixed_commitment = std::move(fixed_commitment);
  TraditionalModel tm{build_master(c, bids, {}, o), {}};
  auto& m = tm.master.model;
  const auto& lay = tm.master.layout;
  const int nu = static_cast<int>(c.units.size());
  const int nt = c.horizon;
  if (req.up.size() != nt || req.down.size() != nt)
    throw std::invalid_argument("build_traditional: requirement vectors must cover the horizon");
  auto& tl = tm.layout;
  tl.reserve_up.resize(nu, nt);
  tl.reserve_down.resize(nu, nt);
  tl.req_up.resize(nt);
  tl.req_down.resize(nt);
  for (int t = 0; t < nt; ++t) {
    std::vector<Term> su, sd;
    for (int i = 0; i < nu; ++i) {
      const auto& u = c.units[i];
      const int qu = m.add_variable(tag("Qup", i, t), 0.0, kInf);
      const int qd = m.add_variable(tag("Qdown", i, t), -kInf, 0.0);
      tl.reserve_up(i, t) = qu;
      tl.reserve_down(i, t) = qd;
      // I p_min <= Q^down + P,  Q^up + P <= I p_max
      std::vector<Term> lo{{qd, 1.0}}, hi{{qu, 1.0}};
      output_terms(lay, u, i, t, 1.0, lo);
      output_terms(lay, u, i, t, 1.0, hi);
      lo.push_back({lay.commit(i, t), -u.p_min});
      hi.push_back({lay.commit(i, t), -u.p_max});
      m.add_constraint(tag("reslo", i, t), lo, Sense::GreaterEqual, 0.0);
      m.add_constraint(tag("reshi", i, t), hi, Sense::LessEqual, 0.0);
      // -ramp_down I <= Q^down,  Q^up <= ramp_up I
      m.add_constraint(tag("resrd", i, t), {{qd, 1.0}, {lay.commit(i, t), u.ramp_down * c.dt}}, Sense::GreaterEqual, 0.0);
      m.add_constraint(tag("resru", i, t), {{qu, 1.0}, {lay.commit(i, t), -u.ramp_up * c.dt}}, Sense::LessEqual, 0.0);
      su.push_back({qu, 1.0});
      sd.push_back({qd, 1.0});
    }
    tl.req_up[t] = m.add_constraint("requp[" + std::to_string(t + 1) + "]", su, Sense::GreaterEqual, req.up[t]);
    tl.req_down[t] = m.add_constraint("reqdown[" + std::to_string(t + 1) + "]", sd, Sense::LessEqual, req.down[t]);
  }
  return tm;
}

}  // namespace umpclear
