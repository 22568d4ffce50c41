#pragma once

#include "umpclear/model/case.hpp"

#include <stdexcept>
#include <vector>

namespace umpclear {

template <typename Scalar>
struct BidSegment {
  Scalar lo, hi;
  Scalar marginal_cost;
  [[nodiscard]] Scalar width() const { return hi - lo; }
};

template <typename Scalar>
struct PiecewiseBid {
  std::string unit_id;
  std::vector<BidSegment<Scalar>> segments;
  Scalar fixed_cost;  // charged per committed hour; covers output up to p_min
};

// Equal-width segments over [p_min, p_max], each priced at the derivative of
// a*P^2 + b*P at its midpoint.
template <typename Scalar = double>
PiecewiseBid<Scalar> build_bid_curve(const Unit& unit, int n_segments = 5) {
  if (n_segments < 1) throw std::invalid_argument("build_bid_curve: n_segments must be >= 1");
  const Scalar a(unit.cost_a), b(unit.cost_b), c(unit.cost_c);
  const Scalar lo(unit.p_min), hi(unit.p_max);
  PiecewiseBid<Scalar> bid;
  bid.unit_id = unit.id;
  bid.fixed_cost = a * lo * lo + b * lo + c;
  if (!(hi > lo)) {
    bid.segments.push_back({lo, lo, Scalar(2) * a * lo + b});
    return bid;
  }
  const Scalar w = (hi - lo) / Scalar(n_segments);
  for (int k = 0; k < n_segments; ++k) {
    const Scalar s = lo + w * Scalar(k);
    const Scalar e = k + 1 == n_segments ? hi : lo + w * Scalar(k + 1);
    bid.segments.push_back({s, e, Scalar(2) * a * (s + e) / Scalar(2) + b});
  }
  return bid;
}

// Cost of producing P on a committed unit under the piecewise bid.
template <typename Scalar>
Scalar bid_cost(const PiecewiseBid<Scalar>& bid, Scalar p) {
  Scalar z = bid.fixed_cost;
  for (const auto& s : bid.segments) {
    if (p <= s.lo) break;
    z += s.marginal_cost * ((p < s.hi ? p : s.hi) - s.lo);
  }
  return z;
}

inline std::vector<PiecewiseBid<double>> build_bids(const SystemCase& c, int n_segments = 5) {
  std::vector<PiecewiseBid<double>> out;
  for (const auto& u : c.units) out.push_back(build_bid_curve<double>(u, n_segments));
  return out;
}

}  // namespace umpclear
