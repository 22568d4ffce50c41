#include "umpclear/optim/solve.hpp"

#include "simplex.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

namespace umpclear::optim {

const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::Unbounded: return "unbounded";
  }
  return "unknown";
}

namespace {

double bounded_dual_objective(const LinearModel& model, const SolveResult& r) {
  double z = model.objective_constant();
  for (int i = 0; i < model.num_constraints(); ++i) z += r.duals[i] * model.constraint(i).rhs;
  for (int j = 0; j < model.num_variables(); ++j) {
    const double dj = r.reduced_costs[j];
    const auto& v = model.variable(j);
    if (dj > 0.0 && std::isfinite(v.lower)) z += dj * v.lower;
    else if (dj < 0.0 && std::isfinite(v.upper)) z += dj * v.upper;
    else if (dj != 0.0) z += dj * r.primal[j];
  }
  return z;
}

}  // namespace

SolveResult solve_lp(const LinearModel& model, const LpOptions& options) {
  detail::Simplex simplex(model, options);
  const SolveStatus status = simplex.solve();
  SolveResult result;
  simplex.export_result(status, result);
  result.objective += model.objective_constant();
  if (result.optimal()) result.dual_objective = bounded_dual_objective(model, result);
  return result;
}

Certificate certify(const LinearModel& model, const SolveResult& r) {
  Certificate c;
  if (!r.optimal()) return c;
  c.primal_residual = model.max_violation(r.primal);
  c.duality_gap = std::abs(r.objective - bounded_dual_objective(model, r));
  for (int i = 0; i < model.num_constraints(); ++i) {
    const auto& row = model.constraint(i);
    double ax = 0.0;
    for (const auto& t : row.terms) ax += t.coef * r.primal[t.var];
    const double y = r.duals[i];
    c.complementary_slackness = std::max(c.complementary_slackness, std::abs(y * (ax - row.rhs)));
    if (row.sense == Sense::LessEqual) c.dual_sign_violation = std::max(c.dual_sign_violation, y);
    if (row.sense == Sense::GreaterEqual) c.dual_sign_violation = std::max(c.dual_sign_violation, -y);
  }
  for (int j = 0; j < model.num_variables(); ++j) {
    const auto& v = model.variable(j);
    const double dj = r.reduced_costs[j];
    const double slack = std::min(r.primal[j] - v.lower, v.upper - r.primal[j]);
    if (std::isfinite(slack))
      c.complementary_slackness = std::max(c.complementary_slackness, std::abs(dj) * std::max(0.0, slack));
    if (v.lower == v.upper) continue;
    const bool at_lower = std::abs(r.primal[j] - v.lower) <= Tolerances::feasibility;
    const bool at_upper = std::abs(r.primal[j] - v.upper) <= Tolerances::feasibility;
    if (!at_lower) c.dual_sign_violation = std::max(c.dual_sign_violation, dj);
    if (!at_upper) c.dual_sign_violation = std::max(c.dual_sign_violation, -dj);
  }
  return c;
}

namespace {

class InternalBackend final : public SolverBackend {
 public:
  explicit InternalBackend(MipOptions options) : options_(options) {}
  [[nodiscard]] std::string name() const override { return "internal"; }
  SolveResult lp(const LinearModel& model) override { return solve_lp(model, options_.lp); }
  SolveResult mip(const LinearModel& model, double gap_tol) override {
    MipOptions o = options_;
    o.gap_tol = gap_tol;
    return solve_mip(model, o);
  }

 private:
  MipOptions options_;
};

std::unique_ptr<SolverBackend> (*g_external_factory)() = nullptr;

}  // namespace

std::unique_ptr<SolverBackend> make_internal_backend(MipOptions options) {
  return std::make_unique<InternalBackend>(options);
}

void register_external_backend(std::unique_ptr<SolverBackend> (*factory)()) {
  g_external_factory = factory;
}

std::unique_ptr<SolverBackend> select_backend(const std::string& name) {
  std::string choice = name;
  if (choice.empty()) {
    const char* env = std::getenv("UMPCLEAR_SOLVER");
    choice = env ? env : "internal";
  }
  if (choice.empty() || choice == "internal") return make_internal_backend();
  if (choice == "external") {
    if (!g_external_factory)
      throw SolverError("UMPCLEAR_SOLVER=external but no external solver backend is registered");
    return g_external_factory();
  }
  throw SolverError("unknown solver backend '" + choice + "' (expected internal|external)");
}

}  // namespace umpclear::optim
