#include <doctest.h>

#include "umpclear/model/bids.hpp"
#include "umpclear/scuc/master.hpp"
#include "umpclear/settlement/settlement.hpp"
#include "umpclear/uncertainty/uncertainty_set.hpp"

using namespace umpclear;

namespace {

const std::string kCase = UMPCLEAR_CASE_DIR "/garver6.json";

struct Fixture {
  SystemCase c = load_case_file(kCase);
  std::vector<PiecewiseBid<double>> bids = build_bids(c);
  std::unique_ptr<optim::SolverBackend> be = optim::make_internal_backend();

  RobustSchedule solve(const std::vector<Scenario>& pool, const MasterOptions& o = {}) {
    const MasterModel m = build_master(c, bids, pool, o);
    return extract_schedule(c, m, solve_master(c, m, *be));
  }
};

Scenario hour_scenario(const SystemCase& c, int t, double e1, double e3) {
  Scenario s = Scenario::Zero(c.num_buses, c.horizon);
  s(0, t) = e1;
  s(2, t) = e3;
  return s;
}

}  // namespace

TEST_CASE("reserve capability") {
  const SystemCase c = load_case_file(kCase);
  auto r = reserve_capability(195.19, 1, c.units[0]);
  CHECK(r.up == doctest::Approx(24.0));
  CHECK(r.down == doctest::Approx(-24.0));
  r = reserve_capability(16.54, 1, c.units[2]);
  CHECK(r.up == doctest::Approx(3.46));
  CHECK(r.down == doctest::Approx(-5.0));
  r = reserve_capability(0.0, 0, c.units[1]);
  CHECK(r.up == 0.0);
  CHECK(r.down == 0.0);
  r = reserve_capability(10.0, 1, c.units[1]);
  CHECK(r.down == doctest::Approx(0.0));
  CHECK(r.up == doctest::Approx(12.0));
}

TEST_CASE("one unit, one bus, flat load") {
  SystemCase c;
  c.num_buses = 1;
  c.horizon = 3;
  Unit u;
  u.id = "U";
  u.p_min = 10.0;
  u.p_max = 50.0;
  u.p0 = 25.0;
  u.cost_a = 0.01;
  u.cost_b = 12.0;
  u.cost_c = 5.0;
  u.ramp_up = u.ramp_down = 40.0;
  u.t0 = 2;
  c.units.push_back(u);
  c.load.base = Eigen::VectorXd::Constant(3, 25.0);
  c.load.distribution = Eigen::VectorXd::Ones(1);
  c.bounds = Eigen::MatrixXd::Zero(1, 3);
  const auto bids = build_bids(c);
  auto be = optim::make_internal_backend();
  const MasterModel m = build_master(c, bids, {});
  const RobustSchedule s = extract_schedule(c, m, solve_master(c, m, *be));
  for (int t = 0; t < 3; ++t) {
    CHECK(s.commitment(0, t) == 1);
    CHECK(s.dispatch(0, t) == doctest::Approx(25.0));
  }
  CHECK(s.total_cost == doctest::Approx(3.0 * bid_cost(bids[0], 25.0)));
}

TEST_CASE("deterministic 6-bus schedule") {
  Fixture f;
  const RobustSchedule s = f.solve({});
  CHECK(s.total_cost == doctest::Approx(87975.0).epsilon(1.0 / 87975.0));
  for (int t = 0; t < 24; ++t) CHECK(s.commitment(0, t) == 1);
  for (int t = 0; t < 9; ++t) CHECK(s.commitment(2, t) == 0);
  for (int t = 9; t < 24; ++t) CHECK(s.commitment(2, t) == 1);
  for (int t = 4; t < 10; ++t) CHECK(s.commitment(1, t) == 0);
  for (int t = 0; t < 24; ++t) {
    for (int i = 0; i < 3; ++i) {
      const auto& u = f.c.units[i];
      CHECK(s.dispatch(i, t) >= s.commitment(i, t) * u.p_min - 1e-6);
      CHECK(s.dispatch(i, t) <= s.commitment(i, t) * u.p_max + 1e-6);
      const Reserve r = reserve_capability(s.dispatch(i, t), s.commitment(i, t), u);
      CHECK(s.reserve_up(i, t) == doctest::Approx(r.up));
      CHECK(s.reserve_down(i, t) == doctest::Approx(r.down));
      CHECK(s.reserve_up(i, t) >= 0.0);
      CHECK(s.reserve_down(i, t) <= 0.0);
      if (t > 0 && s.commitment(i, t) && s.commitment(i, t - 1))
        CHECK(std::abs(s.dispatch(i, t) - s.dispatch(i, t - 1)) <= u.ramp_up + 1e-6);
    }
    CHECK(s.dispatch.col(t).sum() == doctest::Approx(f.c.load.base[t]));
    for (int l = 0; l < 7; ++l) CHECK(std::abs(s.base_flows(l, t)) <= f.c.lines[l].capacity + 1e-6);
  }
}

TEST_CASE("adding scenarios never lowers cost") {
  Fixture f;
  const double c0 = f.solve({}).total_cost;
  const Scenario k1 = hour_scenario(f.c, 20, 31.15, 8.31);
  const Scenario k2 = hour_scenario(f.c, 21, -31.99, -8.53);
  const double c1 = f.solve({k1}).total_cost;
  const double c2 = f.solve({k1, k2}).total_cost;
  CHECK(c1 >= c0 - 1e-6 * c0);
  CHECK(c2 >= c1 - 1e-6 * c1);
  CHECK(c1 > c0 + 1.0);
}

TEST_CASE("infeasible master names the hour") {
  Fixture f;
  const Scenario big = hour_scenario(f.c, 4, 500.0, 0.0);
  try {
    f.solve({big});
    FAIL("expected MasterInfeasibleError");
  } catch (const MasterInfeasibleError& e) {
    CHECK(e.hour() == 4);
  }
}

TEST_CASE("traditional reserve model equals the robust model without lines") {
  Fixture f;
  const auto set = make_uncertainty_set(f.c, 0.8, 2.0);
  // with two uncertain buses and budget 2, each hour has the same four vertices
  std::vector<Scenario> pool(4, Scenario::Zero(f.c.num_buses, f.c.horizon));
  for (int t = 0; t < f.c.horizon; ++t) {
    const auto v = enumerate_vertices(set, t);
    REQUIRE(v.size() == 4);
    for (int k = 0; k < 4; ++k) pool[k].col(t) = v[k];
  }
  MasterOptions o;
  o.transmission = false;
  const RobustSchedule robust = f.solve(pool, o);
  const TraditionalPrices trad = traditional_prices(f.c, f.bids, requirement_from_set(set), *f.be);
  CHECK(trad.schedule.total_cost == doctest::Approx(robust.total_cost).epsilon(1e-6));
  // requirement check at t=21: sum of optimized upward reserves covers 0.8 * (31.15 + 8.31)
  CHECK(trad.reserve_q_up.col(20).sum() >= 0.8 * (31.15 + 8.31) - 1e-6);

  // zero requirements reduce to unconstrained-network economic dispatch
  TraditionalRequirement zero{Eigen::VectorXd::Zero(24), Eigen::VectorXd::Zero(24)};
  const TraditionalModel tm = build_traditional(f.c, f.bids, zero);
  const double plain = extract_schedule(f.c, tm.master, solve_master(f.c, tm.master, *f.be)).total_cost;
  CHECK(plain == doctest::Approx(f.solve({}, o).total_cost).epsilon(1e-6));
}
