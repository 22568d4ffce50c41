#pragma once

#include <Eigen/Dense>

#include <vector>

namespace umpclear {

// Scenario values: bus x hour, positive = more demand.
using Scenario = Eigen::MatrixXd;

struct StorageSchedule {
  Eigen::VectorXd energy;     // end-of-hour level E_t
  Eigen::VectorXd discharge;  // P^D_t <= 0
  Eigen::VectorXd charge;     // P^C_t >= 0
  Eigen::VectorXi discharging, charging;

  [[nodiscard]] double net_injection(int t) const { return -(discharge[t] + charge[t]); }
};

struct RobustSchedule {
  Eigen::MatrixXi commitment;  // unit x hour
  Eigen::MatrixXd dispatch;    // unit x hour
  std::vector<Eigen::MatrixXd> scenario_dispatch;
  Eigen::MatrixXd reserve_up, reserve_down;  // unit x hour, derived from dispatch
  Eigen::MatrixXd base_flows;                // line x hour
  std::vector<StorageSchedule> storage;
  double total_cost = 0.0;
};

}  // namespace umpclear
