#include "umpclear/storage/storage.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace umpclear {

using optim::Sense;

void attach_storage(MasterModel& mm, const SystemCase& c, int index) {
  if (index < 0 || index >= static_cast<int>(c.storage.size()))
    throw std::out_of_range("attach_storage: no such device");
  const StorageDevice& dev = c.storage[index];
  if (dev.bus < 0 || dev.bus >= c.num_buses) throw std::invalid_argument("attach_storage: device bus out of range");
  auto& m = mm.model;
  auto& lay = mm.layout;
  const int nt = c.horizon;
  const double dt = c.dt;
  const std::string id = dev.id;
  auto name = [&](const char* what, int t) { return id + "." + what + "[" + std::to_string(t + 1) + "]"; };

  StorageLayout sl;
  sl.device = index;
  for (int t = 0; t < nt; ++t) {
    const double e_lo = t == nt - 1 ? dev.e0 : 0.0;
    const double e_hi = t == nt - 1 ? dev.e0 : dev.e_max;
    sl.energy.push_back(m.add_variable(name("E", t), e_lo, e_hi));
    sl.discharge.push_back(m.add_variable(name("PD", t), -dev.discharge_rate, 0.0));
    sl.charge.push_back(m.add_variable(name("PC", t), 0.0, dev.charge_rate));
    if (mm.options.fixed_storage_modes) {
      const double a = (*mm.options.fixed_storage_modes)(2 * index, t);
      const double b = (*mm.options.fixed_storage_modes)(2 * index + 1, t);
      sl.discharging.push_back(m.add_variable(name("ID", t), a, a));
      sl.charging.push_back(m.add_variable(name("IC", t), b, b));
    } else {
      sl.discharging.push_back(m.add_binary(name("ID", t)));
      sl.charging.push_back(m.add_binary(name("IC", t)));
      m.set_priority(sl.discharging.back(), -1);
      m.set_priority(sl.charging.back(), -1);
    }
    std::vector<optim::Term> bal{{sl.energy[t], 1.0},
                                 {sl.discharge[t], -dev.eff_discharge * dt},
                                 {sl.charge[t], -dev.eff_charge * dt}};
    if (t > 0) bal.push_back({sl.energy[t - 1], -1.0});
    m.add_constraint(name("energy", t), bal, Sense::Equal, t == 0 ? dev.e0 : 0.0);
    m.add_constraint(name("dischargecap", t), {{sl.discharge[t], 1.0}, {sl.discharging[t], dev.discharge_rate}},
                     Sense::GreaterEqual, 0.0);
    m.add_constraint(name("chargecap", t), {{sl.charge[t], 1.0}, {sl.charging[t], -dev.charge_rate}},
                     Sense::LessEqual, 0.0);
    m.add_constraint(name("mode", t), {{sl.discharging[t], 1.0}, {sl.charging[t], 1.0}}, Sense::LessEqual, 1.0);

    // Net injection -(PD + PC) enters balance and flows.
    m.add_term(lay.balance[t], sl.discharge[t], -1.0);
    m.add_term(lay.balance[t], sl.charge[t], -1.0);
    for (int l = 0; l < lay.line_up.rows(); ++l) {
      const double f = mm.sf(l, dev.bus);
      for (int v : {sl.discharge[t], sl.charge[t]}) {
        m.add_term(lay.line_up(l, t), v, -f);
        m.add_term(lay.line_down(l, t), v, f);
      }
    }
  }

  for (size_t k = 0; k < lay.scenarios.size(); ++k) {
    auto& blk = lay.scenarios[k];
    std::vector<int> pd(nt), pc(nt);
    for (int t = 0; t < nt; ++t) {
      const std::string sfx = "." + std::to_string(k);
      pd[t] = m.add_variable(name("pd", t) + sfx, -dev.discharge_rate, 0.0);
      pc[t] = m.add_variable(name("pc", t) + sfx, 0.0, dev.charge_rate);
      // Recourse must be deliverable from the level at the start of the hour.
      std::vector<optim::Term> lvl{{pd[t], dev.eff_discharge * dt}, {pc[t], dev.eff_charge * dt}};
      double e_prev = dev.e0;
      if (t > 0) {
        lvl.push_back({sl.energy[t - 1], 1.0});
        e_prev = 0.0;
      }
      m.add_constraint(name("slevel-", t) + sfx, lvl, Sense::GreaterEqual, -e_prev);
      m.add_constraint(name("slevel+", t) + sfx, lvl, Sense::LessEqual, dev.e_max - e_prev);
      m.add_term(blk.balance[t], pd[t], -1.0);
      m.add_term(blk.balance[t], pc[t], -1.0);
      for (int l = 0; l < blk.line_up.rows(); ++l) {
        const double f = mm.sf(l, dev.bus);
        for (int v : {pd[t], pc[t]}) {
          m.add_term(blk.line_up(l, t), v, -f);
          m.add_term(blk.line_down(l, t), v, f);
        }
      }
    }
    sl.scen_discharge.push_back(std::move(pd));
    sl.scen_charge.push_back(std::move(pc));
  }
  lay.storage.push_back(std::move(sl));
}

StorageSchedule extract_storage(const MasterModel&, const StorageLayout& sl, const Eigen::VectorXd& x, int horizon) {
  StorageSchedule s;
  s.energy.resize(horizon);
  s.discharge.resize(horizon);
  s.charge.resize(horizon);
  s.discharging.resize(horizon);
  s.charging.resize(horizon);
  for (int t = 0; t < horizon; ++t) {
    s.energy[t] = x[sl.energy[t]];
    s.discharge[t] = x[sl.discharge[t]];
    s.charge[t] = x[sl.charge[t]];
    s.discharging[t] = static_cast<int>(std::lround(x[sl.discharging[t]]));
    s.charging[t] = static_cast<int>(std::lround(x[sl.charging[t]]));
  }
  return s;
}

Reserve storage_reserve(const StorageDevice& d, const StorageSchedule& s, int t, double dt) {
  const double g = s.net_injection(t);
  const double e = s.energy[t];
  const double up = std::min(d.discharge_rate - g, e / dt);
  const double down = std::min(d.charge_rate + g, (d.e_max - e) / dt);
  return {std::max(0.0, up), -std::max(0.0, down)};
}

}  // namespace umpclear
