#include "umpclear/pricing/pricing.hpp"

namespace umpclear {

Eigen::MatrixXd PriceSet::line_shadow() const {
  Eigen::MatrixXd s = mu_up - mu_down;
  for (size_t k = 0; k < eta_up.size(); ++k) s += eta_up[k] - eta_down[k];
  return s;
}

MasterOptions rsced_options(const MasterOptions& base, const RobustSchedule& s) {
  MasterOptions o = base;
  o.fixed_commitment = s.commitment;
  if (!s.storage.empty()) {
    Eigen::MatrixXi modes(2 * static_cast<int>(s.storage.size()), s.commitment.cols());
    for (size_t d = 0; d < s.storage.size(); ++d) {
      modes.row(2 * d) = s.storage[d].discharging.transpose();
      modes.row(2 * d + 1) = s.storage[d].charging.transpose();
    }
    o.fixed_storage_modes = modes;
  }
  return o;
}

MasterModel build_rsced(const SystemCase& c, const std::vector<PiecewiseBid<double>>& bids,
                        const RobustSchedule& s, const std::vector<Scenario>& pool, const MasterOptions& base) {
  return build_master(c, bids, pool, rsced_options(base, s));
}

PriceSet extract_prices(const SystemCase& c, const MasterModel& m, const optim::SolveResult& r) {
  if (!r.optimal()) throw optim::SolverError("extract_prices: result is not optimal");
  if (r.duals.size() != m.model.num_constraints()) throw optim::SolverError("extract_prices: missing duals");
  const auto& lay = m.layout;
  const auto& y = r.duals;
  const int nb = c.num_buses, nt = c.horizon;
  const int nu = static_cast<int>(c.units.size());
  const int nl = static_cast<int>(lay.line_up.rows());
  const int nk = static_cast<int>(lay.scenarios.size());

  // d(cost)/d(withdrawal at bus b) through one balance row and its directed line rows.
  auto nodal = [&](int bal, const Eigen::MatrixXi& up, const Eigen::MatrixXi& down, int t, Eigen::MatrixXd& mu_p,
                   Eigen::MatrixXd& mu_m) {
    Eigen::VectorXd v = Eigen::VectorXd::Constant(nb, y[bal]);
    for (int l = 0; l < nl; ++l) {
      mu_p(l, t) = -y[up(l, t)];
      mu_m(l, t) = -y[down(l, t)];
      v += (mu_m(l, t) - mu_p(l, t)) * m.sf.row(l).transpose();
    }
    return v;
  };

  PriceSet p;
  p.lmp.setZero(nb, nt);
  p.ump_up.setZero(nb, nt);
  p.ump_down.setZero(nb, nt);
  p.mu_up.setZero(nl, nt);
  p.mu_down.setZero(nl, nt);
  p.opportunity_up.setZero(nu, nt);
  p.opportunity_down.setZero(nu, nt);
  for (int t = 0; t < nt; ++t) p.lmp.col(t) = nodal(lay.balance[t], lay.line_up, lay.line_down, t, p.mu_up, p.mu_down);

  for (int k = 0; k < nk; ++k) {
    const auto& blk = lay.scenarios[k];
    Eigen::MatrixXd pi(nb, nt), eu = Eigen::MatrixXd::Zero(nl, nt), ed = Eigen::MatrixXd::Zero(nl, nt);
    Eigen::MatrixXd bu(nu, nt), bd(nu, nt);
    Eigen::MatrixXi dir = Eigen::MatrixXi::Zero(nb, nt);
    for (int t = 0; t < nt; ++t) {
      pi.col(t) = nodal(blk.balance[t], blk.line_up, blk.line_down, t, eu, ed);
      for (int i = 0; i < nu; ++i) {
        bu(i, t) = -y[blk.cap_up(i, t)];
        bd(i, t) = -y[blk.cap_down(i, t)];
      }
    }
    // Load enters every block, so the scenario term is part of the nodal price.
    p.lmp += pi;
    for (int t = 0; t < nt; ++t)
      for (int b = 0; b < nb; ++b) {
        const double v = pi(b, t);
        if (v > 0.0) {
          p.ump_up(b, t) += v;
          dir(b, t) = 1;
        } else if (v < 0.0) {
          p.ump_down(b, t) += v;
          dir(b, t) = -1;
        }
      }
    for (int t = 0; t < nt; ++t)
      for (int i = 0; i < nu; ++i) {
        const int d = dir(c.units[i].bus, t);
        if (d > 0) p.opportunity_up(i, t) += bu(i, t);
        if (d < 0) p.opportunity_down(i, t) += bd(i, t);
      }
    p.scenario_price.push_back(std::move(pi));
    p.eta_up.push_back(std::move(eu));
    p.eta_down.push_back(std::move(ed));
    p.beta_up.push_back(std::move(bu));
    p.beta_down.push_back(std::move(bd));
    p.direction.push_back(std::move(dir));
  }
  return p;
}

SignReport verify_sign_property(const SystemCase& c, const PriceSet& p, const std::vector<Scenario>& pool,
                                double tol) {
  SignReport rep;
  for (size_t k = 0; k < pool.size() && k < p.scenario_price.size(); ++k)
    for (int t = 0; t < c.horizon; ++t)
      for (int b = 0; b < c.num_buses; ++b) {
        if (c.bounds(b, t) <= 0.0) continue;
        ++rep.checked;
        const double pr = p.scenario_price[k](b, t), e = pool[k](b, t);
        if (pr * e < -tol) rep.violations.push_back({static_cast<int>(k), b, t, pr, e});
      }
  return rep;
}

}  // namespace umpclear
