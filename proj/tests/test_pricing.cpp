#include <doctest.h>

#include "umpclear/ccg/ccg.hpp"
#include "umpclear/pricing/pricing.hpp"
#include "umpclear/settlement/settlement.hpp"

using namespace umpclear;

namespace {

Unit unit(const std::string& id, int bus, double cap, double price, double ramp, double p0) {
  Unit u;
  u.id = id;
  u.bus = bus;
  u.p_max = cap;
  u.p0 = p0;
  u.cost_b = price;
  u.ramp_up = u.ramp_down = ramp;
  u.t0 = 1;
  return u;
}

// Cheap A behind a 50 MW line, ramp-limited B at the load bus; +-5 MW at bus 2.
SystemCase two_bus() {
  SystemCase c;
  c.num_buses = 2;
  c.horizon = 1;
  c.units = {unit("A", 0, 200, 10, 100, 48), unit("B", 1, 100, 30, 3, 32)};
  c.lines = {{"1-2", 0, 1, 0.1, 50.0}};
  c.load.base = Eigen::VectorXd::Constant(1, 80.0);
  c.load.distribution = Eigen::Vector2d(0.0, 1.0);
  c.bounds = Eigen::MatrixXd::Zero(2, 1);
  c.bounds(1, 0) = 5.0;
  return c;
}

// One bus: A can cover the load but must hold back what B's 5 MW ramp cannot.
SystemCase one_bus() {
  SystemCase c;
  c.num_buses = 1;
  c.horizon = 1;
  c.units = {unit("A", 0, 100, 10, 100, 95), unit("B", 0, 100, 30, 5, 15)};
  c.load.base = Eigen::VectorXd::Constant(1, 110.0);
  c.load.distribution = Eigen::VectorXd::Ones(1);
  c.bounds = Eigen::MatrixXd::Constant(1, 1, 10.0);
  return c;
}

struct Cleared {
  CcgResult ccg;
  MasterModel ed;
  optim::SolveResult lp;
  PriceSet prices;
};

Cleared clear(const SystemCase& c, double lambda, double budget, bool lines = true) {
  auto be = optim::make_internal_backend();
  const auto bids = build_bids(c);
  CcgOptions o;
  o.master.transmission = lines;
  CcgResult r = run_ccg(c, bids, make_uncertainty_set(c, lambda, budget), o, *be);
  MasterModel ed = build_rsced(c, bids, r.schedule, r.pool, o.master);
  optim::SolveResult lp = be->lp(ed.model);
  PriceSet p = extract_prices(c, ed, lp);
  return {std::move(r), std::move(ed), std::move(lp), std::move(p)};
}

}  // namespace

TEST_CASE("two-bus congestion with scarce local ramp") {
  const SystemCase c = two_bus();
  const Cleared x = clear(c, 1.0, 1.0);
  // base: A 48, B 32 so that +5 at bus 2 is met by B's 3 MW ramp plus 2 MW over the line
  CHECK(x.ccg.schedule.dispatch(0, 0) == doctest::Approx(48.0));
  CHECK(x.ccg.schedule.dispatch(1, 0) == doctest::Approx(32.0));
  CHECK(x.ccg.schedule.total_cost == doctest::Approx(48 * 10 + 32 * 30));
  CHECK(x.prices.lmp(0, 0) == doctest::Approx(10.0));
  CHECK(x.prices.lmp(1, 0) == doctest::Approx(30.0));
  CHECK(x.prices.ump_up(1, 0) == doctest::Approx(20.0));
  CHECK(x.prices.ump_up(0, 0) == doctest::Approx(0.0));
  CHECK(x.prices.ump_down.cwiseAbs().maxCoeff() == doctest::Approx(0.0));

  const auto cert = optim::certify(x.ed.model, x.lp);
  CHECK(cert.duality_gap < 1e-6);
  CHECK(cert.complementary_slackness < 1e-6);
  CHECK(cert.dual_sign_violation < 1e-9);
  CHECK(verify_sign_property(c, x.prices, x.ccg.pool).ok());

  const auto set = make_uncertainty_set(c, 1.0, 1.0);
  const SettlementReport rep = settle(c, set, x.ccg.schedule, x.prices);
  CHECK(rep.theta(1, 0) == doctest::Approx(20.0 * 3.0));
  CHECK(rep.psi(1, 0) == doctest::Approx(20.0 * 5.0));
  CHECK(rep.residue[0] == doctest::Approx(40.0));

  // an FTR for the full line capability is underfunded by exactly the residue
  const FtrAccount a = ftr_settle(Eigen::Vector2d(50.0, -50.0), x.ed.sf, x.prices, x.ccg.schedule, 0);
  CHECK(a.credit == doctest::Approx(20.0 * 50.0));
  CHECK(a.rent == doctest::Approx(20.0 * 48.0));
  CHECK(a.underfunding == doctest::Approx(rep.residue[0]));
}

TEST_CASE("single bus: uncertainty price equals the reserve price") {
  const SystemCase c = one_bus();
  const Cleared x = clear(c, 1.0, 1.0, false);
  CHECK(x.ccg.schedule.dispatch(0, 0) == doctest::Approx(95.0));
  CHECK(x.prices.lmp(0, 0) == doctest::Approx(30.0));
  CHECK(x.prices.ump_up(0, 0) == doctest::Approx(20.0));
  CHECK(x.prices.opportunity_up(0, 0) == doctest::Approx(20.0));
  CHECK(x.prices.opportunity_up(1, 0) == doctest::Approx(0.0));

  auto be = optim::make_internal_backend();
  const auto set = make_uncertainty_set(c, 1.0, 1.0);
  const TraditionalPrices tp = traditional_prices(c, build_bids(c), requirement_from_set(set), *be);
  CHECK(tp.lmp[0] == doctest::Approx(30.0));
  CHECK(tp.reserve_up[0] == doctest::Approx(20.0));
  CHECK(tp.reserve_up[0] == doctest::Approx(x.prices.ump_up(0, 0)));
  CHECK(tp.schedule.total_cost == doctest::Approx(x.ccg.schedule.total_cost));

  const SettlementReport rep = settle(c, set, x.ccg.schedule, x.prices);
  CHECK(rep.residue[0] == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(rep.psi.sum() == doctest::Approx(rep.theta.sum()));
}

TEST_CASE("no uncertainty: prices are plain LMPs") {
  SystemCase c = two_bus();
  c.bounds.setZero();
  const Cleared x = clear(c, 1.0, 1.0);
  CHECK(x.ccg.pool.empty());
  CHECK(x.ccg.log.iterations.size() == 1);
  CHECK(x.ccg.schedule.dispatch(0, 0) == doctest::Approx(50.0));
  CHECK(x.prices.lmp(0, 0) == doctest::Approx(10.0));
  CHECK(x.prices.lmp(1, 0) == doctest::Approx(30.0));
  CHECK(x.prices.ump_up.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("CCG iteration limit carries the last schedule") {
  const SystemCase c = two_bus();
  auto be = optim::make_internal_backend();
  CcgOptions o;
  o.max_iterations = 1;
  try {
    run_ccg(c, build_bids(c), make_uncertainty_set(c, 1.0, 1.0), o, *be);
    FAIL("expected CcgIterationLimitError");
  } catch (const CcgIterationLimitError& e) {
    CHECK(e.log().iterations.size() == 1);
    CHECK(e.last_schedule().dispatch(0, 0) == doctest::Approx(50.0));
  }
}
