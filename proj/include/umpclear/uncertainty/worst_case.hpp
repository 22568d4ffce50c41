#pragma once

#include "umpclear/model/case.hpp"
#include "umpclear/optim/solve.hpp"
#include "umpclear/scuc/schedule.hpp"
#include "umpclear/uncertainty/uncertainty_set.hpp"

#include <Eigen/Dense>

namespace umpclear {

// Minimum total slack (MW) needed to redispatch hour t of the schedule
// against eps: slacks on the balance and on every directed line limit.
// `sf` with zero rows disables line limits.
double redispatch_violation(const SystemCase& c, const Eigen::MatrixXd& sf, const RobustSchedule& s, int t,
                            const Eigen::VectorXd& eps);

struct HourWorstCase {
  Eigen::VectorXd eps;
  double violation = 0.0;
};

// Vertex maximizing redispatch_violation; ties go to the lexicographically
// smallest vertex.
HourWorstCase worst_case(const UncertaintySet& set, const SystemCase& c, const Eigen::MatrixXd& sf,
                         const RobustSchedule& s, int t, int vertex_cap = 15);

}  // namespace umpclear
