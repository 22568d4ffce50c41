#include <doctest.h>

#include "umpclear/model/bids.hpp"
#include "umpclear/model/case.hpp"
#include "umpclear/model/network.hpp"

#include <string>

using namespace umpclear;

namespace {

const std::string kCase = UMPCLEAR_CASE_DIR "/garver6.json";

std::string tiny_case(double p_min = 10, const std::string& dist = R"({"1": 1.0})") {
  return R"({"horizon": 2, "units": [{"id": "A", "bus": 1, "p_min": )" + std::to_string(p_min) +
         R"(, "p_max": 50, "p0": 20, "cost_a": 0, "cost_b": 10, "cost_c": 0, "ramp_up": 50, "ramp_down": 50,
    "min_on": 1, "min_off": 1, "t0": 1}], "lines": [], "load": {"base": [20, 30], "distribution": )" +
         dist + "}}";
}

}  // namespace

TEST_CASE("garver case loads") {
  const SystemCase c = load_case_file(kCase);
  CHECK(c.num_buses == 6);
  CHECK(c.horizon == 24);
  CHECK(c.units.size() == 3);
  CHECK(c.lines.size() == 7);
  CHECK(c.units[2].bus == 5);  // G3 sits on bus 6
  CHECK(c.bounds(0, 20) == doctest::Approx(31.15));
  CHECK(c.bounds(2, 21) == doctest::Approx(8.53));
  CHECK(c.bounds(1, 20) == 0.0);
}

TEST_CASE("bus loads split the system load by distribution") {
  const SystemCase c = load_case_file(kCase);
  const Eigen::VectorXd l = bus_loads(c, 20);
  CHECK(l[2] == doctest::Approx(47.462));
  CHECK(l[3] == doctest::Approx(94.924));
  CHECK(l[4] == doctest::Approx(94.924));
  CHECK(l[0] == 0.0);
  CHECK(l.sum() == doctest::Approx(237.31));
}

TEST_CASE("case errors") {
  CHECK_NOTHROW(load_case(tiny_case()));
  CHECK_THROWS_AS(load_case(tiny_case(60)), CaseValidationError);
  CHECK_THROWS_AS(load_case(R"({"horizon": 2})"), CaseParseError);
  CHECK_THROWS_AS(load_case("{not json"), CaseParseError);
  CHECK_THROWS_AS(load_case(tiny_case(10, R"({"1": 0.9})")), CaseValidationError);
  CHECK_THROWS_AS(load_case_file("/nonexistent/case.json"), CaseParseError);
  try {
    load_case_file("/nonexistent/case.json");
  } catch (const CaseParseError& e) {
    CHECK(std::string(e.what()).find("/nonexistent/case.json") != std::string::npos);
  }
}

TEST_CASE("validation names the unit") {
  SystemCase c = load_case(tiny_case());
  c.units[0].p_min = 60.0;
  try {
    validate(c);
    FAIL("expected CaseValidationError");
  } catch (const CaseValidationError& e) {
    CHECK(std::string(e.what()).find("unit A") != std::string::npos);
  }
}

TEST_CASE("bid curve matches hand-computed segment prices") {
  const SystemCase c = load_case_file(kCase);
  const auto g1 = build_bid_curve<double>(c.units[0]);
  REQUIRE(g1.segments.size() == 5);
  CHECK(g1.segments[0].lo == doctest::Approx(100));
  CHECK(g1.segments[0].hi == doctest::Approx(124));
  // 2 * 0.004 * 112 + 13.5
  CHECK(g1.segments[0].marginal_cost == doctest::Approx(14.396));
  CHECK(g1.segments[4].marginal_cost == doctest::Approx(2 * 0.004 * 208 + 13.5));
  CHECK(g1.segments[4].marginal_cost == doctest::Approx(15.164));
  const auto g3 = build_bid_curve<double>(c.units[2]);
  CHECK(g3.segments[3].lo == doctest::Approx(16));
  CHECK(g3.segments[3].hi == doctest::Approx(18));
  CHECK(g3.segments[3].marginal_cost == doctest::Approx(17.77));
  // fixed cost covers p_min
  CHECK(g1.fixed_cost == doctest::Approx(0.004 * 1e4 + 13.5 * 100 + 176.9));

  Unit lin = c.units[0];
  lin.cost_a = 0.0;
  for (const auto& s : build_bid_curve<double>(lin).segments) CHECK(s.marginal_cost == doctest::Approx(lin.cost_b));
  CHECK_THROWS_AS(build_bid_curve<double>(lin, 0), std::invalid_argument);
}

TEST_CASE("piecewise cost stays within the quadratic's chord error") {
  const SystemCase c = load_case_file(kCase);
  const Unit& u = c.units[0];
  const auto bid = build_bid_curve<double>(u);
  for (double p = u.p_min; p <= u.p_max; p += 7.5) {
    const double quad = u.cost_a * p * p + u.cost_b * p + u.cost_c;
    const double w = (u.p_max - u.p_min) / 5.0;
    CHECK(std::abs(bid_cost(bid, p) - quad) <= u.cost_a * w * w / 4.0 + 1e-9);
  }
  CHECK(bid_cost(bid, u.p_max) == doctest::Approx(u.cost_a * u.p_max * u.p_max + u.cost_b * u.p_max + u.cost_c));
}

TEST_CASE("shift factors: two buses") {
  std::vector<Line> lines{{"1-2", 0, 1, 0.1, 100}};
  const Eigen::MatrixXd sf = compute_shift_factors(lines, 2, 0);
  CHECK(sf(0, 0) == doctest::Approx(0.0));
  CHECK(sf(0, 1) == doctest::Approx(-1.0));
  const Eigen::MatrixXd sf1 = compute_shift_factors(lines, 2, 1);
  CHECK(sf1(0, 0) == doctest::Approx(1.0));
}

TEST_CASE("shift factors: parallel paths split by admittance") {
  // bus 1 -> bus 2 directly (x=0.1) and through bus 3 (x=0.1 + 0.1)
  std::vector<Line> lines{{"a", 0, 1, 0.1, 100}, {"b", 0, 2, 0.1, 100}, {"c", 2, 1, 0.1, 100}};
  const Eigen::MatrixXd sf = compute_shift_factors(lines, 3, 1);
  CHECK(sf(0, 0) == doctest::Approx(2.0 / 3.0));
  CHECK(sf(1, 0) == doctest::Approx(1.0 / 3.0));
  CHECK(sf(2, 0) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("shift factors satisfy Kirchhoff's current law") {
  const SystemCase c = load_case_file(kCase);
  const Eigen::MatrixXd sf = compute_shift_factors(c.lines, c.num_buses, 0);
  for (int b = 1; b < c.num_buses; ++b) {
    Eigen::VectorXd net = Eigen::VectorXd::Zero(c.num_buses);
    for (size_t l = 0; l < c.lines.size(); ++l) {
      net[c.lines[l].from_bus] -= sf(l, b);
      net[c.lines[l].to_bus] += sf(l, b);
    }
    // injection of 1 at b leaves through lines; withdrawal at the slack
    for (int i = 0; i < c.num_buses; ++i) {
      const double expect = i == b ? -1.0 : (i == 0 ? 1.0 : 0.0);
      CHECK(net[i] == doctest::Approx(expect).epsilon(1e-9));
    }
  }
  // every loop has zero voltage-angle sum: flows times reactance along 1-2-4-1
  const Eigen::VectorXd f = sf.col(3);
  CHECK(f[0] * 0.17 + f[2] * 0.197 - f[1] * 0.258 == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("disconnected network throws") {
  std::vector<Line> lines{{"1-2", 0, 1, 0.1, 100}};
  CHECK_THROWS_AS(compute_shift_factors(lines, 3, 0), NetworkError);
  CHECK(isolated_buses(lines, 3, 0) == std::vector<int>{2});
}

TEST_CASE("shift factors in long double agree") {
  const SystemCase c = load_case_file(kCase);
  const Eigen::MatrixXd d = compute_shift_factors(c.lines, c.num_buses, 0);
  const auto q = compute_shift_factors<long double>(c.lines, c.num_buses, 0);
  CHECK((q.cast<double>() - d).cwiseAbs().maxCoeff() < 1e-12);
}
