#pragma once

#include "umpclear/optim/linear_model.hpp"

#include <Eigen/Dense>

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>

namespace umpclear::optim {

enum class SolveStatus { Optimal, Infeasible, Unbounded };

const char* to_string(SolveStatus status);

// Result of an LP or MIP solve.
//
// `duals[i]` is the sensitivity d(objective)/d(rhs_i) of row i, so a binding
// `<=` row of a minimization has a nonpositive dual and a binding `>=` row a
// nonnegative one. `reduced_costs[j]` is c_j - y'A_j. For an infeasible LP,
// `farkas` holds a row multiplier vector proving infeasibility.
struct SolveResult {
  SolveStatus status = SolveStatus::Infeasible;
  Eigen::VectorXd primal;
  double objective = 0.0;
  Eigen::VectorXd duals;
  Eigen::VectorXd reduced_costs;
  Eigen::VectorXd farkas;
  double dual_objective = 0.0;
  long iterations = 0;
  long nodes = 0;  // MIP only

  [[nodiscard]] bool optimal() const { return status == SolveStatus::Optimal; }
};

struct LpOptions {
  long max_iterations = 500000;
  // Consecutive degenerate pivots tolerated before switching to Bland's rule.
  int degenerate_limit = 50;
  int refactor_interval = 100;
};

struct MipOptions {
  double gap_tol = 1e-6;  // relative
  long node_limit = 200000;
  LpOptions lp;
};

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Thrown when branch-and-bound exhausts its node budget.
class NodeLimitError : public SolverError {
 public:
  NodeLimitError(const std::string& what, std::optional<SolveResult> incumbent)
      : SolverError(what), incumbent_(std::move(incumbent)) {}
  [[nodiscard]] const std::optional<SolveResult>& incumbent() const { return incumbent_; }

 private:
  std::optional<SolveResult> incumbent_;
};

// Bounded revised simplex. Integer markers are ignored.
SolveResult solve_lp(const LinearModel& model, const LpOptions& options = {});

// LP-based branch and bound: most-fractional branching (lowest index on
// ties), depth-first dives; backtracking is LIFO until an incumbent
// exists, best bound afterwards. Higher branch priority goes first.
SolveResult solve_mip(const LinearModel& model, const MipOptions& options = {});

// Pluggable solver kernel. The built-in kernel is always available; an
// external backend may be registered at runtime.
class SolverBackend {
 public:
  virtual ~SolverBackend() = default;
  [[nodiscard]] virtual std::string name() const = 0;
  virtual SolveResult lp(const LinearModel& model) = 0;
  virtual SolveResult mip(const LinearModel& model, double gap_tol) = 0;
};

std::unique_ptr<SolverBackend> make_internal_backend(MipOptions options = {});

// Register the backend returned for "external". Passing nullptr clears it.
void register_external_backend(std::unique_ptr<SolverBackend> (*factory)());

// Backend named by `name` ("internal" or "external"); an empty name reads
// the UMPCLEAR_SOLVER environment variable and defaults to internal.
std::unique_ptr<SolverBackend> select_backend(const std::string& name = {});

// Residual checks used by tests and the acceptance suite.
struct Certificate {
  double primal_residual = 0.0;
  double duality_gap = 0.0;
  double complementary_slackness = 0.0;
  double dual_sign_violation = 0.0;
};
Certificate certify(const LinearModel& model, const SolveResult& result);

}  // namespace umpclear::optim
