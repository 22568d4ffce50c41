#pragma once

// Internal bounded revised simplex engine shared by solve_lp and solve_mip.

#include "umpclear/optim/solve.hpp"

#include <Eigen/SparseLU>

#include <vector>

namespace umpclear::optim::detail {

enum class VarState : unsigned char { Basic, AtLower, AtUpper, Free };

struct Basis {
  std::vector<int> head;
  std::vector<VarState> state;
  bool operator==(const Basis&) const = default;
};

// Bounded simplex over  A x - s = 0,  l <= (x, s) <= u.
//
// Column j < n is structural; column n + i is the logical of row i with
// coefficient -1. The engine keeps its factorization between solves so a
// branch-and-bound child can re-optimize from its parent's basis after a
// bound change without refactoring.
class Simplex {
 public:
  Simplex(const LinearModel& model, LpOptions options);

  // Re-optimize from the current basis. Dual simplex when the basis is dual
  // feasible, otherwise a two-phase primal simplex.
  SolveStatus solve();

  void set_structural_bounds(int j, double lower, double upper);
  [[nodiscard]] double structural_lower(int j) const { return lo_[j]; }
  [[nodiscard]] double structural_upper(int j) const { return up_[j]; }

  [[nodiscard]] Basis basis() const { return {head_, state_}; }
  void set_basis(const Basis& basis);

  [[nodiscard]] double objective() const;
  [[nodiscard]] Eigen::VectorXd structural_values() const { return x_.head(n_); }
  [[nodiscard]] long iterations() const { return iterations_; }
  [[nodiscard]] double reduced_cost(int j) const { return d_[j]; }
  [[nodiscard]] VarState state(int j) const { return state_[j]; }

  // Fill primal/dual/reduced-cost fields of a result for the last solve.
  void export_result(SolveStatus status, SolveResult& out) const;

 private:
  using SpMat = Eigen::SparseMatrix<double>;
  struct Eta {
    int row;
    double pivot;
    std::vector<int> index;
    std::vector<double> value;
  };

  void refactor();
  void ftran(Eigen::VectorXd& v) const;
  void btran(Eigen::VectorXd& v) const;
  void load_column(int j, Eigen::VectorXd& out) const;
  double column_dot(int j, const Eigen::VectorXd& v) const;
  void place_nonbasic(int j);
  void compute_primal();
  void compute_duals(const Eigen::VectorXd& cost);
  bool make_dual_feasible();
  void pivot(int r, int q, const Eigen::VectorXd& alpha_q);

  enum class Outcome { Optimal, Infeasible, Unbounded, Fallback };
  Outcome dual_simplex();
  Outcome primal_simplex();

  [[nodiscard]] double infeasibility(int j) const;
  void bump_iteration();

  LpOptions opt_;
  int m_ = 0;
  int n_ = 0;
  SpMat a_;
  Eigen::VectorXd cost_, lo_, up_;
  std::vector<int> head_;
  std::vector<int> pos_;
  std::vector<VarState> state_;
  Eigen::VectorXd x_, y_, d_;
  mutable Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>> lu_;
  std::vector<Eta> etas_;
  bool factored_ = false;
  long iterations_ = 0;
  long solve_start_ = 0;  // iteration limit applies per solve()
  int infeasible_row_ = -1;
  Eigen::VectorXd farkas_;
};

}  // namespace umpclear::optim::detail
