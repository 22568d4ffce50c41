#pragma once

#include <Eigen/SparseCore>

#include <iosfwd>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace umpclear::optim {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Solver tolerances shared by the LP and MIP kernels.
struct Tolerances {
  static constexpr double feasibility = 1e-7;
  static constexpr double duality = 1e-6;
  static constexpr double integrality = 1e-7;
  static constexpr double pivot = 1e-9;
};

enum class Sense { LessEqual, Equal, GreaterEqual };

struct Term {
  int var;
  double coef;
};

struct Variable {
  std::string name;
  double lower = 0.0;
  double upper = kInf;
  double cost = 0.0;
  bool is_integer = false;
  int priority = 0;  // branch-and-bound branches higher first
};

struct Constraint {
  std::string name;
  std::vector<Term> terms;
  Sense sense = Sense::LessEqual;
  double rhs = 0.0;
};

// A minimization problem  min c'x + c0  s.t.  rows (<=, =, >=) rhs,  l <= x <= u.
//
// Duplicate terms passed to add_constraint are merged; zero coefficients are
// dropped. Once built, a model is treated as immutable by the solvers.
class LinearModel {
 public:
  int add_variable(std::string name, double lower, double upper, double cost = 0.0,
                   bool is_integer = false);
  int add_binary(std::string name, double cost = 0.0) {
    return add_variable(std::move(name), 0.0, 1.0, cost, true);
  }
  int add_constraint(std::string name, std::vector<Term> terms, Sense sense, double rhs);

  void set_cost(int var, double cost) { vars_.at(var).cost = cost; }
  void add_cost(int var, double cost) { vars_.at(var).cost += cost; }
  void set_bounds(int var, double lower, double upper);
  void set_integer(int var, bool is_integer) { vars_.at(var).is_integer = is_integer; }
  void set_priority(int var, int priority) { vars_.at(var).priority = priority; }
  void set_rhs(int row, double rhs) { rows_.at(row).rhs = rhs; }
  // Adds coef * x_var to an existing row, merging with any existing term.
  void add_term(int row, int var, double coef);
  void set_objective_constant(double c0) { constant_ = c0; }
  void add_objective_constant(double c0) { constant_ += c0; }

  [[nodiscard]] int num_variables() const { return static_cast<int>(vars_.size()); }
  [[nodiscard]] int num_constraints() const { return static_cast<int>(rows_.size()); }
  [[nodiscard]] const Variable& variable(int j) const { return vars_.at(j); }
  [[nodiscard]] const Constraint& constraint(int i) const { return rows_.at(i); }
  [[nodiscard]] const std::vector<Variable>& variables() const { return vars_; }
  [[nodiscard]] const std::vector<Constraint>& constraints() const { return rows_; }
  [[nodiscard]] double objective_constant() const { return constant_; }
  [[nodiscard]] bool has_integers() const;

  // Row-by-variable coefficient matrix in column-major storage.
  [[nodiscard]] Eigen::SparseMatrix<double> matrix() const;

  // Objective value c'x + c0 of an arbitrary point.
  [[nodiscard]] double evaluate(const Eigen::VectorXd& x) const;
  // Largest bound or row violation of x.
  [[nodiscard]] double max_violation(const Eigen::VectorXd& x) const;

 private:
  std::vector<Variable> vars_;
  std::vector<Constraint> rows_;
  double constant_ = 0.0;
};

// CPLEX LP text format; names are sanitized to [A-Za-z0-9_.].
void write_lp(const LinearModel& model, std::ostream& out);

}  // namespace umpclear::optim
