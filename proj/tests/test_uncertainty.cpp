#include <doctest.h>

#include "umpclear/model/network.hpp"
#include "umpclear/uncertainty/uncertainty_set.hpp"
#include "umpclear/uncertainty/worst_case.hpp"

#include <algorithm>
#include <random>

using namespace umpclear;

namespace {

const std::string kCase = UMPCLEAR_CASE_DIR "/garver6.json";

UncertaintySet box(std::vector<double> u, double lambda, double budget) {
  UncertaintySet s;
  s.bounds = Eigen::Map<Eigen::VectorXd>(u.data(), static_cast<Eigen::Index>(u.size()));
  s.bus_budget = lambda;
  s.system_budget = budget;
  return s;
}

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  int i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

// One bus, one unit with p_max = cap, dispatched at `p`.
SystemCase single_bus(double cap, double load) {
  SystemCase c;
  c.num_buses = 1;
  c.horizon = 1;
  Unit u;
  u.id = "U";
  u.p_min = 0.0;
  u.p_max = cap;
  u.p0 = load;
  u.cost_b = 10.0;
  u.ramp_up = u.ramp_down = 100.0;
  u.t0 = 1;
  c.units.push_back(u);
  c.load.base = Eigen::VectorXd::Constant(1, load);
  c.load.distribution = Eigen::VectorXd::Ones(1);
  c.bounds = Eigen::MatrixXd::Constant(1, 1, 5.0);
  return c;
}

RobustSchedule flat(const SystemCase& c, const Eigen::VectorXd& p) {
  RobustSchedule s;
  s.commitment = Eigen::MatrixXi::Ones(static_cast<int>(c.units.size()), c.horizon);
  s.dispatch = p.replicate(1, c.horizon);
  return s;
}

}  // namespace

TEST_CASE("membership") {
  const SystemCase c = load_case_file(kCase);
  auto set = make_uncertainty_set(c, 1.0, 2.0);
  Eigen::VectorXd e = Eigen::VectorXd::Zero(6);
  CHECK(contains(set, e, 20));
  e[0] = 31.15;
  e[2] = 8.31;
  CHECK(contains(set, e, 20));
  set.system_budget = 1.0;
  CHECK_FALSE(contains(set, e, 20));
  e.setZero();
  e[1] = 0.1;  // bus 2 carries no uncertainty
  CHECK_FALSE(contains(set, e, 20));
  CHECK_THROWS_AS(make_uncertainty_set(c, -1.0, 1.0), std::invalid_argument);
}

TEST_CASE("vertex enumeration examples") {
  auto v = enumerate_vertices(box({31.15, 8.31}, 1.0, 2.0), 0);
  REQUIRE(v.size() == 4);
  for (const auto& x : v) {
    CHECK(std::abs(x[0]) == doctest::Approx(31.15));
    CHECK(std::abs(x[1]) == doctest::Approx(8.31));
  }
  v = enumerate_vertices(box({10.0}, 1.0, 0.5), 0);
  REQUIRE(v.size() == 2);
  CHECK(v[0][0] == doctest::Approx(-5.0));
  CHECK(v[1][0] == doctest::Approx(5.0));
  v = enumerate_vertices(box({10.0, 10.0}, 1.0, 1.0), 0);
  REQUIRE(v.size() == 4);
  CHECK(v[0] == vec({-10, 0}));
  CHECK(v[1] == vec({0, -10}));
  CHECK(v[2] == vec({0, 10}));
  CHECK(v[3] == vec({10, 0}));
  CHECK(enumerate_vertices(box({10.0, 10.0}, 0.0, 1.0), 0).size() == 1);
  CHECK(enumerate_vertices(box({10.0, 10.0}, 1.0, 0.0), 0).size() == 1);
  CHECK_THROWS_AS(enumerate_vertices(box(std::vector<double>(17, 1.0), 1.0, 2.0), 0), VertexCapError);
}

TEST_CASE("vertices are certified, sorted and closed under negation") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.5, 20.0);
  for (double budget : {0.0, 0.7, 1.0, 1.5, 2.0, 2.3, 4.0}) {
    std::vector<double> ub{u(rng), 0.0, u(rng), u(rng)};
    const auto set = box(ub, 0.8, budget);
    const auto v = enumerate_vertices(set, 0);
    CHECK(std::is_sorted(v.begin(), v.end(), lex_less));
    for (const auto& x : v) {
      CHECK(contains(set, x, 0, 1e-9));
      CHECK(is_vertex(set, x, 0));
      const Eigen::VectorXd neg = -x;
      CHECK(std::any_of(v.begin(), v.end(), [&](const Eigen::VectorXd& y) { return (y - neg).norm() < 1e-12; }));
    }
  }
  const auto set = box({10.0, 10.0}, 1.0, 1.0);
  CHECK_FALSE(is_vertex(set, vec({5, 5}), 0));
  CHECK_FALSE(is_vertex(set, vec({3, 0}), 0));
}

TEST_CASE("vertices attain every linear maximum over the set") {
  // brute-force oracle: maximize random directions over a fine grid of members
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  const auto set = box({6.0, 3.0, 9.0}, 1.0, 1.6);
  const auto v = enumerate_vertices(set, 0);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Vector3d d(g(rng), g(rng), g(rng));
    double best_v = -1e300;
    for (const auto& x : v) best_v = std::max(best_v, d.dot(x));
    double best_grid = -1e300;
    for (int i = -20; i <= 20; ++i)
      for (int j = -20; j <= 20; ++j)
        for (int k = -20; k <= 20; ++k) {
          const Eigen::Vector3d x(6.0 * i / 20.0, 3.0 * j / 20.0, 9.0 * k / 20.0);
          if (contains(set, x, 0)) best_grid = std::max(best_grid, d.dot(x));
        }
    CHECK(best_v >= best_grid - 1e-9);
  }
}

TEST_CASE("sampled members lie in the set") {
  const SystemCase c = load_case_file(kCase);
  const auto set = make_uncertainty_set(c, 0.8, 1.3);
  std::mt19937_64 rng(42);
  for (int i = 0; i < 500; ++i) {
    const int t = i % c.horizon;
    CHECK(contains(set, sample_member(set, t, rng), t, 1e-9));
  }
}

TEST_CASE("max total deviation is the greedy budget fill") {
  CHECK(max_total_deviation(box({31.15, 8.31}, 0.8, 2.0), 0) == doctest::Approx(0.8 * (31.15 + 8.31)));
  CHECK(max_total_deviation(box({31.15, 8.31}, 1.0, 1.0), 0) == doctest::Approx(31.15));
  CHECK(max_total_deviation(box({4.0, 8.0, 2.0}, 1.0, 1.5), 0) == doctest::Approx(8.0 + 2.0));
}

TEST_CASE("single-bus redispatch violation") {
  const SystemCase c = single_bus(13.0, 10.0);
  const RobustSchedule s = flat(c, Eigen::VectorXd::Constant(1, 10.0));
  const Eigen::MatrixXd no_lines(0, 1);
  CHECK(redispatch_violation(c, no_lines, s, 0, Eigen::VectorXd::Constant(1, 5.0)) == doctest::Approx(2.0));
  CHECK(redispatch_violation(c, no_lines, s, 0, Eigen::VectorXd::Constant(1, -5.0)) == doctest::Approx(0.0));
  CHECK(redispatch_violation(c, no_lines, s, 0, Eigen::VectorXd::Constant(1, 3.0)) == doctest::Approx(0.0));
  const auto set = make_uncertainty_set(c, 1.0, 1.0);
  const auto w = worst_case(set, c, no_lines, s, 0);
  CHECK(w.violation == doctest::Approx(2.0));
  CHECK(w.eps[0] == doctest::Approx(5.0));
}

TEST_CASE("ample headroom gives zero violation") {
  SystemCase c = single_bus(1000.0, 10.0);
  c.units[0].p_max = 1000.0;
  const RobustSchedule s = flat(c, Eigen::VectorXd::Constant(1, 500.0));
  c.load.base[0] = 500.0;
  const auto set = make_uncertainty_set(c, 1.0, 1.0);
  const auto w = worst_case(set, c, Eigen::MatrixXd(0, 1), s, 0);
  CHECK(w.violation == doctest::Approx(0.0));
  // ties resolve to the lexicographically first vertex
  CHECK(w.eps[0] == doctest::Approx(-5.0));
}

TEST_CASE("worst case dominates sampled members on the 6-bus case") {
  const SystemCase c = load_case_file(kCase);
  const Eigen::MatrixXd sf = compute_shift_factors(c.lines, c.num_buses);
  // a thin schedule: G1 and G2 at the load split with little headroom
  RobustSchedule s;
  s.commitment = Eigen::MatrixXi::Ones(3, c.horizon);
  s.dispatch = Eigen::MatrixXd::Zero(3, c.horizon);
  for (int t = 0; t < c.horizon; ++t) {
    const double l = c.load.base[t];
    s.dispatch(2, t) = 10.0;
    s.dispatch(1, t) = std::clamp(l - 10.0 - 210.0, 10.0, 100.0);
    s.dispatch(0, t) = l - 10.0 - s.dispatch(1, t);
  }
  const auto set = make_uncertainty_set(c, 1.0, 2.0);
  std::mt19937_64 rng(7);
  for (int t : {15, 20, 21}) {
    const auto w = worst_case(set, c, sf, s, t);
    CHECK(contains(set, w.eps, t, 1e-9));
    for (int i = 0; i < 100; ++i) {
      const Eigen::VectorXd e = sample_member(set, t, rng);
      CHECK(redispatch_violation(c, sf, s, t, e) <= w.violation + 1e-7);
    }
  }
}
