#include "umpclear/uncertainty/worst_case.hpp"

#include <algorithm>

namespace umpclear {

using optim::kInf;
using optim::Sense;
using optim::Term;

double redispatch_violation(const SystemCase& c, const Eigen::MatrixXd& sf, const RobustSchedule& s, int t,
                            const Eigen::VectorXd& eps) {
  const int nu = static_cast<int>(c.units.size());
  optim::LinearModel m;
  std::vector<std::pair<int, int>> inj;  // (var, bus)
  for (int i = 0; i < nu; ++i) {
    const auto& u = c.units[i];
    const int on = s.commitment(i, t);
    const double p = s.dispatch(i, t);
    const double lo = std::max(on * u.p_min, p - on * u.ramp_down * c.dt);
    const double hi = std::min(on * u.p_max, p + on * u.ramp_up * c.dt);
    inj.push_back({m.add_variable("p" + std::to_string(i), lo, std::max(lo, hi)), u.bus});
  }
  for (size_t d = 0; d < s.storage.size() && d < c.storage.size(); ++d) {
    const auto& dev = c.storage[d];
    const double e_prev = t == 0 ? dev.e0 : s.storage[d].energy[t - 1];
    const int pd = m.add_variable("pd", -dev.discharge_rate, 0.0);
    const int pc = m.add_variable("pc", 0.0, dev.charge_rate);
    std::vector<Term> lvl{{pd, dev.eff_discharge * c.dt}, {pc, dev.eff_charge * c.dt}};
    m.add_constraint("level-", lvl, Sense::GreaterEqual, -e_prev);
    m.add_constraint("level+", lvl, Sense::LessEqual, dev.e_max - e_prev);
    // Negated: net injection is -(pd + pc).
    inj.push_back({pd, -1 - dev.bus});
    inj.push_back({pc, -1 - dev.bus});
  }
  auto coef_bus = [](int code) { return code >= 0 ? std::make_pair(1.0, code) : std::make_pair(-1.0, -1 - code); };

  const Eigen::VectorXd load = bus_loads(c, t) + eps;
  std::vector<Term> bal;
  for (auto [v, code] : inj) bal.push_back({v, coef_bus(code).first});
  bal.push_back({m.add_variable("short", 0.0, kInf, 1.0), 1.0});
  bal.push_back({m.add_variable("surplus", 0.0, kInf, 1.0), -1.0});
  m.add_constraint("balance", bal, Sense::Equal, load.sum());
  for (int l = 0; l < sf.rows(); ++l) {
    std::vector<Term> f, g;
    for (auto [v, code] : inj) {
      auto [sign, bus] = coef_bus(code);
      f.push_back({v, sign * sf(l, bus)});
      g.push_back({v, -sign * sf(l, bus)});
    }
    f.push_back({m.add_variable("over+", 0.0, kInf, 1.0), -1.0});
    g.push_back({m.add_variable("over-", 0.0, kInf, 1.0), -1.0});
    const double shift = sf.row(l).dot(load);
    m.add_constraint("flow+", f, Sense::LessEqual, c.lines[l].capacity + shift);
    m.add_constraint("flow-", g, Sense::LessEqual, c.lines[l].capacity - shift);
  }
  const auto r = optim::solve_lp(m);
  if (!r.optimal()) throw optim::SolverError("redispatch LP failed: " + std::string(optim::to_string(r.status)));
  return std::max(0.0, r.objective);
}

HourWorstCase worst_case(const UncertaintySet& set, const SystemCase& c, const Eigen::MatrixXd& sf,
                         const RobustSchedule& s, int t, int vertex_cap) {
  HourWorstCase best;
  bool first = true;
  for (const auto& v : enumerate_vertices(set, t, vertex_cap)) {
    const double val = redispatch_violation(c, sf, s, t, v);
    if (first || val > best.violation + 1e-9) {
      best = {v, val};
      first = false;
    }
  }
  return best;
}

}  // namespace umpclear
