#include "umpclear/ccg/ccg.hpp"

#include "umpclear/model/network.hpp"
#include "umpclear/uncertainty/worst_case.hpp"

namespace umpclear {

ScheduleWorstCase schedule_worst_case(const SystemCase& c, const UncertaintySet& set, const MasterModel& m,
                                      const RobustSchedule& s, int vertex_cap) {
  ScheduleWorstCase w;
  w.scenario = Scenario::Zero(c.num_buses, c.horizon);
  w.violation = Eigen::VectorXd::Zero(c.horizon);
  for (int t = 0; t < c.horizon; ++t) {
    const HourWorstCase h = worst_case(set, c, m.sf, s, t, vertex_cap);
    w.scenario.col(t) = h.eps;
    w.violation[t] = h.violation;
  }
  return w;
}

CcgResult run_ccg(const SystemCase& c, const std::vector<PiecewiseBid<double>>& bids, const UncertaintySet& set,
                  const CcgOptions& options, optim::SolverBackend& backend) {
  if (options.max_iterations < 1) throw std::invalid_argument("run_ccg: max_iterations must be >= 1");
  CcgResult out;
  for (int it = 0; it < options.max_iterations; ++it) {
    MasterModel mm = build_master(c, bids, out.pool, options.master);
    optim::SolveResult r = solve_master(c, mm, backend, options.gap_tol);
    RobustSchedule s = extract_schedule(c, mm, r);
    const ScheduleWorstCase w = schedule_worst_case(c, set, mm, s, options.vertex_cap);

    CcgIteration rec;
    rec.master_cost = r.objective;
    rec.max_violation = w.max_violation();
    rec.nodes = r.nodes;
    Eigen::Index worst = 0;
    w.violation.maxCoeff(&worst);
    rec.worst_hour = static_cast<int>(worst);
    if (rec.max_violation <= options.tol) {
      out.log.iterations.push_back(rec);
      out.schedule = std::move(s);
      out.master = std::move(mm);
      out.master_result = std::move(r);
      return out;
    }
    for (const auto& p : out.pool)
      if ((p - w.scenario).cwiseAbs().maxCoeff() <= 1e-9)
        throw optim::SolverError("ccg: worst case repeats a pooled scenario; master and subproblem disagree");
    rec.added = true;
    out.log.iterations.push_back(rec);
    out.pool.push_back(w.scenario);
    if (it + 1 == options.max_iterations)
      throw CcgIterationLimitError("ccg: iteration limit " + std::to_string(options.max_iterations) +
                                       " reached with violation " + std::to_string(rec.max_violation) + " MW",
                                   std::move(s), out.log);
  }
  throw CcgIterationLimitError("ccg: iteration limit reached", {}, out.log);
}

}  // namespace umpclear
