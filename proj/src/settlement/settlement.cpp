#include "umpclear/settlement/settlement.hpp"

#include "umpclear/storage/storage.hpp"

#include <cmath>

namespace umpclear {

EnergySettlement settle_energy(const SystemCase& c, const RobustSchedule& s, const PriceSet& p) {
  const int nu = static_cast<int>(c.units.size()), nt = c.horizon;
  EnergySettlement e;
  e.generator.resize(nu, nt);
  e.load.resize(c.num_buses, nt);
  e.storage.resize(static_cast<int>(s.storage.size()), nt);
  for (int t = 0; t < nt; ++t) {
    for (int i = 0; i < nu; ++i) e.generator(i, t) = s.dispatch(i, t) * p.lmp(c.units[i].bus, t);
    e.load.col(t) = bus_loads(c, t).cwiseProduct(p.lmp.col(t));
    for (size_t d = 0; d < s.storage.size(); ++d)
      e.storage(static_cast<int>(d), t) = s.storage[d].net_injection(t) * p.lmp(c.storage[d].bus, t);
  }
  return e;
}

Eigen::MatrixXd settle_reserve(const SystemCase& c, const RobustSchedule& s, const PriceSet& p) {
  const int nu = static_cast<int>(c.units.size()), nt = c.horizon;
  Eigen::MatrixXd th(nu, nt);
  for (int i = 0; i < nu; ++i)
    for (int t = 0; t < nt; ++t) {
      const int b = c.units[i].bus;
      th(i, t) = p.ump_up(b, t) * s.reserve_up(i, t) + p.ump_down(b, t) * s.reserve_down(i, t);
    }
  return th;
}

Eigen::MatrixXd storage_reserve_credit(const SystemCase& c, const RobustSchedule& s, const PriceSet& p) {
  const int nd = static_cast<int>(s.storage.size()), nt = c.horizon;
  Eigen::MatrixXd th(nd, nt);
  for (int d = 0; d < nd; ++d)
    for (int t = 0; t < nt; ++t) {
      const auto& dev = c.storage[d];
      const Reserve q = storage_reserve(dev, s.storage[d], t, c.dt);
      th(d, t) = p.ump_up(dev.bus, t) * q.up + p.ump_down(dev.bus, t) * q.down;
    }
  return th;
}

Eigen::MatrixXd settle_uncertainty(const UncertaintySet& set, const PriceSet& p) {
  const Eigen::MatrixXd r = set.bus_budget * set.bounds;
  return p.ump_up.cwiseProduct(r) - p.ump_down.cwiseProduct(r);
}

Eigen::VectorXd revenue_residue(const Eigen::MatrixXd& psi, const Eigen::MatrixXd& theta,
                                const Eigen::MatrixXd& storage_theta) {
  Eigen::VectorXd r = psi.colwise().sum().transpose() - theta.colwise().sum().transpose();
  if (storage_theta.size() > 0) r -= storage_theta.colwise().sum().transpose();
  return r;
}

SettlementReport settle(const SystemCase& c, const UncertaintySet& set, const RobustSchedule& s, const PriceSet& p) {
  SettlementReport rep;
  rep.energy = settle_energy(c, s, p);
  rep.theta = settle_reserve(c, s, p);
  rep.storage_theta = storage_reserve_credit(c, s, p);
  rep.psi = settle_uncertainty(set, p);
  rep.residue = revenue_residue(rep.psi, rep.theta, rep.storage_theta);
  const Eigen::MatrixXd sigma = p.line_shadow();
  rep.congestion_rent = Eigen::VectorXd::Zero(c.horizon);
  if (sigma.rows() == s.base_flows.rows())
    for (int t = 0; t < c.horizon; ++t) rep.congestion_rent[t] = sigma.col(t).dot(s.base_flows.col(t));
  return rep;
}

SftResult ftr_sft(const Eigen::VectorXd& portfolio, const Eigen::MatrixXd& sf, const std::vector<Line>& lines,
                  double tol, double resolution) {
  if (portfolio.size() != sf.cols()) throw std::invalid_argument("ftr_sft: portfolio must list every bus");
  if (std::abs(portfolio.sum()) > 1e-3)
    throw std::invalid_argument("ftr_sft: unbalanced portfolio (net " + std::to_string(portfolio.sum()) + " MW)");
  SftResult r;
  r.flows = sf * portfolio;
  r.feasible = true;
  for (int l = 0; l < r.flows.size(); ++l)
    if (std::abs(r.flows[l]) > lines[l].capacity + tol + 0.5 * resolution * sf.row(l).cwiseAbs().sum())
      r.feasible = false;
  return r;
}

FtrAccount ftr_settle(const Eigen::VectorXd& portfolio, const Eigen::MatrixXd& sf, const PriceSet& p,
                      const RobustSchedule& s, int t) {
  if (std::abs(portfolio.sum()) > 1e-3) throw std::invalid_argument("ftr_settle: unbalanced portfolio");
  FtrAccount a;
  a.shadow = p.line_shadow().col(t);
  a.ftr_flows = sf * portfolio;
  a.base_flows = s.base_flows.col(t);
  a.credit = a.shadow.dot(a.ftr_flows);
  a.rent = a.shadow.dot(a.base_flows);
  a.underfunding = a.credit - a.rent;
  return a;
}

TraditionalRequirement requirement_from_set(const UncertaintySet& set) {
  TraditionalRequirement req;
  req.up.resize(set.horizon());
  for (int t = 0; t < set.horizon(); ++t) req.up[t] = max_total_deviation(set, t);
  req.down = -req.up;
  return req;
}

TraditionalPrices traditional_prices(const SystemCase& c, const std::vector<PiecewiseBid<double>>& bids,
                                     const TraditionalRequirement& req, optim::SolverBackend& backend) {
  TraditionalModel uc = build_traditional(c, bids, req);
  const optim::SolveResult r = solve_master(c, uc.master, backend);
  const RobustSchedule first = extract_schedule(c, uc.master, r);
  TraditionalModel ed = build_traditional(c, bids, req, first.commitment);
  const optim::SolveResult lr = solve_master(c, ed.master, backend);
  TraditionalPrices out;
  out.schedule = extract_schedule(c, ed.master, lr);
  const int nt = c.horizon, nu = static_cast<int>(c.units.size());
  out.lmp.resize(nt);
  out.reserve_up.resize(nt);
  out.reserve_down.resize(nt);
  out.reserve_q_up.resize(nu, nt);
  out.reserve_q_down.resize(nu, nt);
  for (int t = 0; t < nt; ++t) {
    out.lmp[t] = lr.duals[ed.master.layout.balance[t]];
    out.reserve_up[t] = lr.duals[ed.layout.req_up[t]];
    out.reserve_down[t] = lr.duals[ed.layout.req_down[t]];
    for (int i = 0; i < nu; ++i) {
      out.reserve_q_up(i, t) = lr.primal[ed.layout.reserve_up(i, t)];
      out.reserve_q_down(i, t) = lr.primal[ed.layout.reserve_down(i, t)];
    }
  }
  return out;
}

}  // namespace umpclear
