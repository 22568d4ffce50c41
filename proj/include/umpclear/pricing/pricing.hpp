#pragma once

#include "umpclear/model/bids.hpp"
#include "umpclear/optim/solve.hpp"
#include "umpclear/scuc/master.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace umpclear {

struct PriceSet {
  Eigen::MatrixXd lmp;                         // bus x hour
  std::vector<Eigen::MatrixXd> scenario_price; // [k] bus x hour
  Eigen::MatrixXd ump_up, ump_down;            // bus x hour
  std::vector<Eigen::MatrixXi> direction;      // [k] bus x hour: +1 in K^up, -1 in K^down, 0 otherwise
  Eigen::MatrixXd opportunity_up, opportunity_down;  // unit x hour
  Eigen::MatrixXd mu_up, mu_down;                    // line x hour, >= 0
  std::vector<Eigen::MatrixXd> eta_up, eta_down;     // [k] line x hour, >= 0
  // [k] unit x hour, scenario capacity-row multipliers; beta_up >= 0 >= beta_down
  std::vector<Eigen::MatrixXd> beta_up, beta_down;

  // Signed total shadow price of each line: base plus every scenario block.
  [[nodiscard]] Eigen::MatrixXd line_shadow() const;
};

// Commitment from a master solution as an RSCED option set.
MasterOptions rsced_options(const MasterOptions& base, const RobustSchedule& s);

// Master with I (and storage modes) fixed: a continuous LP.
MasterModel build_rsced(const SystemCase& c, const std::vector<PiecewiseBid<double>>& bids,
                        const RobustSchedule& s, const std::vector<Scenario>& pool, const MasterOptions& base = {});

PriceSet extract_prices(const SystemCase& c, const MasterModel& m, const optim::SolveResult& r);

struct SignViolation {
  int scenario, bus, hour;
  double price, eps;
};

struct SignReport {
  std::vector<SignViolation> violations;
  int checked = 0;
  [[nodiscard]] bool ok() const { return violations.empty(); }
};

SignReport verify_sign_property(const SystemCase& c, const PriceSet& p, const std::vector<Scenario>& pool,
                                double tol = 1e-6);

}  // namespace umpclear
