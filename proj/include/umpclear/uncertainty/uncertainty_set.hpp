#pragma once

#include "umpclear/model/case.hpp"

#include <Eigen/Dense>

#include <random>
#include <stdexcept>
#include <vector>

namespace umpclear {

// Per-hour budgeted box around the forecast:
//   |eps_m| <= L * u_m,   sum_m |eps_m| / (L * u_m) <= LD.
struct UncertaintySet {
  Eigen::MatrixXd bounds;  // bus x hour
  double bus_budget = 0.0;
  double system_budget = 0.0;

  [[nodiscard]] std::vector<int> uncertain_buses(int t) const;
  [[nodiscard]] int horizon() const { return static_cast<int>(bounds.cols()); }
  [[nodiscard]] int num_buses() const { return static_cast<int>(bounds.rows()); }
};

UncertaintySet make_uncertainty_set(const SystemCase& c, double bus_budget, double system_budget);

class VertexCapError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

bool contains(const UncertaintySet& set, const Eigen::VectorXd& eps, int t, double tol = 1e-9);

// Vertices of the hour-t polytope, as full bus vectors, in ascending
// lexicographic order.
std::vector<Eigen::VectorXd> enumerate_vertices(const UncertaintySet& set, int t, int cap = 15);

// A member is a vertex iff at least M linearly independent constraints are tight.
bool is_vertex(const UncertaintySet& set, const Eigen::VectorXd& eps, int t, double tol = 1e-7);

// Random member of the hour-t polytope.
Eigen::VectorXd sample_member(const UncertaintySet& set, int t, std::mt19937_64& rng);

// Largest system-wide total deviation sum_m eps_m over the hour-t polytope.
double max_total_deviation(const UncertaintySet& set, int t);

bool lex_less(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

}  // namespace umpclear
