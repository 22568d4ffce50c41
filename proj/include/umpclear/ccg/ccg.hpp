#pragma once

#include "umpclear/model/bids.hpp"
#include "umpclear/optim/solve.hpp"
#include "umpclear/scuc/master.hpp"
#include "umpclear/uncertainty/uncertainty_set.hpp"

#include <optional>
#include <vector>

namespace umpclear {

struct CcgOptions {
  int max_iterations = 20;
  double tol = 1e-6;  // MW
  double gap_tol = 1e-6;
  int vertex_cap = 15;
  MasterOptions master;
};

struct CcgIteration {
  double master_cost = 0.0;
  double max_violation = 0.0;
  int worst_hour = -1;
  bool added = false;  // a scenario was appended after this round
  long nodes = 0;
};

struct CcgLog {
  std::vector<CcgIteration> iterations;
};

struct CcgResult {
  RobustSchedule schedule;
  std::vector<Scenario> pool;
  CcgLog log;
  MasterModel master;
  optim::SolveResult master_result;
};

class CcgIterationLimitError : public optim::SolverError {
 public:
  CcgIterationLimitError(const std::string& what, RobustSchedule last, CcgLog log)
      : SolverError(what), last_(std::move(last)), log_(std::move(log)) {}
  [[nodiscard]] const RobustSchedule& last_schedule() const { return last_; }
  [[nodiscard]] const CcgLog& log() const { return log_; }

 private:
  RobustSchedule last_;
  CcgLog log_;
};

// Full-horizon worst case of a schedule: per hour, the worst vertex.
struct ScheduleWorstCase {
  Scenario scenario;
  Eigen::VectorXd violation;  // per hour
  [[nodiscard]] double max_violation() const { return violation.size() ? violation.maxCoeff() : 0.0; }
};
ScheduleWorstCase schedule_worst_case(const SystemCase& c, const UncertaintySet& set, const MasterModel& m,
                                      const RobustSchedule& s, int vertex_cap = 15);

CcgResult run_ccg(const SystemCase& c, const std::vector<PiecewiseBid<double>>& bids, const UncertaintySet& set,
                  const CcgOptions& options, optim::SolverBackend& backend);

}  // namespace umpclear
