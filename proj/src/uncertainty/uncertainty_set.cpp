#include "umpclear/uncertainty/uncertainty_set.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace umpclear {

std::vector<int> UncertaintySet::uncertain_buses(int t) const {
  std::vector<int> out;
  for (int b = 0; b < num_buses(); ++b)
    if (bounds(b, t) > 0.0) out.push_back(b);
  return out;
}

UncertaintySet make_uncertainty_set(const SystemCase& c, double bus_budget, double system_budget) {
  if (!(bus_budget >= 0.0) || !(system_budget >= 0.0))
    throw std::invalid_argument("uncertainty budgets must be nonnegative");
  return {c.bounds, bus_budget, system_budget};
}

bool lex_less(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
}

bool contains(const UncertaintySet& set, const Eigen::VectorXd& eps, int t, double tol) {
  if (eps.size() != set.num_buses()) return false;
  double used = 0.0;
  for (int b = 0; b < set.num_buses(); ++b) {
    const double r = set.bus_budget * set.bounds(b, t);
    if (r <= 0.0) {
      if (std::abs(eps[b]) > tol) return false;
      continue;
    }
    if (std::abs(eps[b]) > r + tol) return false;
    used += std::abs(eps[b]) / r;
  }
  return used <= set.system_budget + tol;
}

std::vector<Eigen::VectorXd> enumerate_vertices(const UncertaintySet& set, int t, int cap) {
  const int nb = set.num_buses();
  std::vector<int> buses;
  if (set.bus_budget > 0.0) buses = set.uncertain_buses(t);
  const int m = static_cast<int>(buses.size());
  if (m > cap)
    throw VertexCapError("hour " + std::to_string(t + 1) + " has " + std::to_string(m) +
                         " uncertain buses, above the vertex-enumeration cap of " + std::to_string(cap) +
                         "; use a MILP subproblem instead");
  std::vector<Eigen::VectorXd> out;
  const double ld = set.system_budget;
  if (m == 0 || ld <= 0.0) {
    out.push_back(Eigen::VectorXd::Zero(nb));
    return out;
  }
  // Normalized coordinates: k saturated at +-1, optionally one at +-frac.
  int k;
  double frac;
  if (ld >= m) {
    k = m;
    frac = 0.0;
  } else {
    k = static_cast<int>(std::floor(ld + 1e-12));
    frac = ld - k;
    if (frac < 1e-12) frac = 0.0;
  }
  std::vector<int> level(m, 0);  // 0 off, 1 saturated, 2 fractional
  std::function<void(int, int, int)> choose = [&](int pos, int sat, int fr) {
    if (pos == m) {
      if (sat != k || fr != (frac > 0.0 ? 1 : 0)) return;
      std::vector<int> active;
      for (int i = 0; i < m; ++i)
        if (level[i] != 0) active.push_back(i);
      const int na = static_cast<int>(active.size());
      for (unsigned signs = 0; signs < (1u << na); ++signs) {
        Eigen::VectorXd v = Eigen::VectorXd::Zero(nb);
        for (int a = 0; a < na; ++a) {
          const int i = active[a];
          const double s = (signs >> a) & 1u ? -1.0 : 1.0;
          const double mag = level[i] == 1 ? 1.0 : frac;
          v[buses[i]] = s * mag * set.bus_budget * set.bounds(buses[i], t);
        }
        out.push_back(std::move(v));
      }
      return;
    }
    level[pos] = 0;
    choose(pos + 1, sat, fr);
    if (sat < k) {
      level[pos] = 1;
      choose(pos + 1, sat + 1, fr);
    }
    if (frac > 0.0 && fr == 0) {
      level[pos] = 2;
      choose(pos + 1, sat, fr + 1);
    }
    level[pos] = 0;
  };
  choose(0, 0, 0);
  std::sort(out.begin(), out.end(), lex_less);
  return out;
}

bool is_vertex(const UncertaintySet& set, const Eigen::VectorXd& eps, int t, double tol) {
  if (!contains(set, eps, t, tol)) return false;
  int saturated = 0, fractional = 0;
  double used = 0.0;
  for (int b = 0; b < set.num_buses(); ++b) {
    const double r = set.bus_budget * set.bounds(b, t);
    if (r <= 0.0) continue;
    const double z = std::abs(eps[b]) / r;
    used += z;
    if (z >= 1.0 - tol) ++saturated;
    else if (z > tol) ++fractional;
  }
  const int m = static_cast<int>(set.uncertain_buses(t).size());
  if (set.bus_budget <= 0.0 || m == 0) return true;
  const bool budget_tight = used >= set.system_budget - tol;
  if (budget_tight) return fractional <= 1;
  return saturated == m;
}

Eigen::VectorXd sample_member(const UncertaintySet& set, int t, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const int nb = set.num_buses();
  Eigen::VectorXd z = Eigen::VectorXd::Zero(nb);
  double used = 0.0;
  for (int b = 0; b < nb; ++b) {
    const double draw = u(rng);  // drawn for every bus so streams do not depend on the bounds
    if (set.bounds(b, t) <= 0.0 || set.bus_budget <= 0.0) continue;
    z[b] = draw;
    used += std::abs(draw);
  }
  if (used > set.system_budget) z *= used > 0.0 ? set.system_budget / used : 0.0;
  Eigen::VectorXd eps(nb);
  for (int b = 0; b < nb; ++b) eps[b] = z[b] * set.bus_budget * set.bounds(b, t);
  return eps;
}

double max_total_deviation(const UncertaintySet& set, int t) {
  std::vector<double> r;
  for (int b : set.uncertain_buses(t)) r.push_back(set.bus_budget * set.bounds(b, t));
  std::sort(r.rbegin(), r.rend());
  double left = set.system_budget, total = 0.0;
  for (double x : r) {
    if (left <= 0.0) break;
    const double take = std::min(1.0, left);
    total += take * x;
    left -= take;
  }
  return total;
}

}  // namespace umpclear
