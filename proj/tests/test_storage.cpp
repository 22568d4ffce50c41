#include <doctest.h>

#include "umpclear/model/bids.hpp"
#include "umpclear/scuc/master.hpp"
#include "umpclear/storage/storage.hpp"

#include <algorithm>
#include <functional>

using namespace umpclear;

namespace {

Unit linear_unit(const std::string& id, double cap, double price) {
  Unit u;
  u.id = id;
  u.p_min = 0.0;
  u.p_max = cap;
  u.p0 = 0.0;
  u.cost_b = price;
  u.ramp_up = u.ramp_down = 1000.0;
  u.t0 = 1;
  return u;
}

// One bus: 20 MW at $10, then 100 MW at $30; one 5 MW / 10 MWh device.
SystemCase toy(std::vector<double> load, double e0 = 5.0) {
  SystemCase c;
  c.num_buses = 1;
  c.horizon = static_cast<int>(load.size());
  c.units = {linear_unit("A", 20.0, 10.0), linear_unit("B", 100.0, 30.0)};
  c.load.base = Eigen::Map<Eigen::VectorXd>(load.data(), c.horizon);
  c.load.distribution = Eigen::VectorXd::Ones(1);
  c.bounds = Eigen::MatrixXd::Zero(1, c.horizon);
  c.storage.push_back({"S", 0, 10.0, e0, 5.0, 5.0, 1.0, 1.0});
  return c;
}

double merit_cost(double net) { return 10.0 * std::min(net, 20.0) + 30.0 * std::max(0.0, net - 20.0); }

StorageDevice device(double e0 = 15.0) { return {"S1", 3, 30.0, e0, 8.0, 8.0, 1.0, 1.0}; }

}  // namespace

TEST_CASE("flat zero schedule is feasible") {
  SystemCase c = toy({10, 10, 10, 10});
  c.storage[0] = {"S", 0, 30.0, 15.0, 8.0, 8.0, 1.0, 1.0};
  MasterModel m = build_master(c, build_bids(c), {});
  const auto& sl = m.layout.storage.at(0);
  for (int t = 0; t < c.horizon; ++t) {
    m.model.set_bounds(sl.discharge[t], 0.0, 0.0);
    m.model.set_bounds(sl.charge[t], 0.0, 0.0);
  }
  const auto r = optim::solve_mip(m.model);
  REQUIRE(r.optimal());
  for (int t = 0; t < c.horizon; ++t) CHECK(r.primal[sl.energy[t]] == doctest::Approx(15.0));
}

TEST_CASE("energy capacity bounds charging") {
  SystemCase c = toy({10, 10, 10, 10});
  c.storage[0] = {"S", 0, 30.0, 15.0, 8.0, 8.0, 1.0, 1.0};
  auto fixed_charge = [&](double a, double b, double third) {
    MasterModel m = build_master(c, build_bids(c), {});
    const auto& sl = m.layout.storage.at(0);
    m.model.set_bounds(sl.charge[0], a, a);
    m.model.set_bounds(sl.charge[1], b, b);
    m.model.set_bounds(sl.charge[2], third, third);
    return optim::solve_mip(m.model);
  };
  const auto r = fixed_charge(7.5, 7.5, 0.0);
  REQUIRE(r.optimal());
  MasterModel m = build_master(c, build_bids(c), {});
  CHECK(r.primal[m.layout.storage[0].energy[1]] == doctest::Approx(30.0));
  CHECK_FALSE(fixed_charge(7.5, 7.5, 0.5).optimal());
  CHECK_FALSE(fixed_charge(8.0, 8.0, 0.0).optimal());
}

TEST_CASE("toy arbitrage matches exhaustive search") {
  const std::vector<double> load{10, 30, 20};
  const SystemCase c = toy(load);
  const auto bids = build_bids(c);
  auto be = optim::make_internal_backend();
  const MasterModel m = build_master(c, bids, {});
  const RobustSchedule s = extract_schedule(c, m, solve_master(c, m, *be));

  // oracle: net injection g in {-5, 0, 5} each hour, energy within [0, 10], back to e0
  double best = 1e300;
  std::vector<double> best_g;
  std::vector<double> g(3);
  std::function<void(int, double)> search = [&](int t, double e) {
    if (t == 3) {
      if (std::abs(e - 5.0) > 1e-9) return;
      double z = 0.0;
      for (int h = 0; h < 3; ++h) z += merit_cost(load[h] - g[h]);
      if (z < best) {
        best = z;
        best_g = g;
      }
      return;
    }
    for (double level : {-5.0, 0.0, 5.0}) {
      const double next = e - level;
      if (next < -1e-9 || next > 10.0 + 1e-9) continue;
      g[t] = level;
      search(t + 1, next);
    }
  };
  search(0, 5.0);
  CHECK(s.total_cost == doctest::Approx(best));
  REQUIRE(s.storage.size() == 1);
  for (int t = 0; t < 3; ++t) CHECK(s.storage[0].net_injection(t) == doctest::Approx(best_g[t]));
  CHECK(best_g[0] < 0.0);  // charges in the valley
  CHECK(best_g[1] > 0.0);  // discharges at the peak
}

TEST_CASE("storage reserve") {
  const StorageDevice d = device();
  StorageSchedule s;
  s.energy = Eigen::VectorXd::Constant(1, 15.0);
  s.discharge = Eigen::VectorXd::Zero(1);
  s.charge = Eigen::VectorXd::Zero(1);
  auto r = storage_reserve(d, s, 0);
  CHECK(r.up == doctest::Approx(8.0));
  CHECK(r.down == doctest::Approx(-8.0));
  s.energy[0] = 0.0;
  r = storage_reserve(d, s, 0);
  CHECK(r.up == doctest::Approx(0.0));
  CHECK(r.down == doctest::Approx(-8.0));
  s.energy[0] = 27.0;
  s.discharge[0] = -3.0;  // already injecting 3
  r = storage_reserve(d, s, 0);
  CHECK(r.up == doctest::Approx(5.0));
  CHECK(r.down == doctest::Approx(-3.0));
}

TEST_CASE("6-bus deterministic schedule with storage") {
  const SystemCase c = load_case_file(UMPCLEAR_CASE_DIR "/garver6_storage.json");
  SystemCase plain = c;
  plain.storage.clear();
  auto be = optim::make_internal_backend();
  const MasterModel m = build_master(c, build_bids(c), {});
  const RobustSchedule s = extract_schedule(c, m, solve_master(c, m, *be));
  const MasterModel m0 = build_master(plain, build_bids(plain), {});
  const RobustSchedule s0 = extract_schedule(plain, m0, solve_master(plain, m0, *be));
  CHECK(s.total_cost <= s0.total_cost + 1e-6 * s0.total_cost);

  const auto& st = s.storage.at(0);
  const auto& d = c.storage[0];
  double telescoped = 0.0;
  for (int t = 0; t < c.horizon; ++t) {
    CHECK(st.discharging[t] * st.charging[t] == 0);
    CHECK(st.energy[t] >= -1e-7);
    CHECK(st.energy[t] <= d.e_max + 1e-7);
    CHECK(-st.discharge[t] <= st.discharging[t] * d.discharge_rate + 1e-7);
    CHECK(st.charge[t] <= st.charging[t] * d.charge_rate + 1e-7);
    const double prev = t == 0 ? d.e0 : st.energy[t - 1];
    CHECK(st.energy[t] == doctest::Approx(prev + d.eff_discharge * st.discharge[t] + d.eff_charge * st.charge[t]));
    telescoped += d.eff_discharge * st.discharge[t] + d.eff_charge * st.charge[t];
  }
  CHECK(telescoped == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(st.energy[c.horizon - 1] == doctest::Approx(d.e0));
}

TEST_CASE("attach_storage rejects a bad index") {
  SystemCase c = toy({10, 10});
  MasterModel m = build_master(c, build_bids(c), {}, {true, 0, false});
  CHECK_THROWS_AS(attach_storage(m, c, 3), std::out_of_range);
}
