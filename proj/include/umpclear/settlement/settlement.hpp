#pragma once

#include "umpclear/model/bids.hpp"
#include "umpclear/pricing/pricing.hpp"
#include "umpclear/scuc/master.hpp"
#include "umpclear/uncertainty/uncertainty_set.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace umpclear {

struct EnergySettlement {
  Eigen::MatrixXd generator;  // unit x hour, credit P * LMP
  Eigen::MatrixXd load;       // bus x hour, payment load * LMP
  Eigen::MatrixXd storage;    // device x hour, credit (net injection) * LMP
};

EnergySettlement settle_energy(const SystemCase& c, const RobustSchedule& s, const PriceSet& p);

// Theta: ump_up * Q^up + ump_down * Q^down at the unit's bus.
Eigen::MatrixXd settle_reserve(const SystemCase& c, const RobustSchedule& s, const PriceSet& p);

// Reserve credit of each storage device (device x hour), same rule as units.
Eigen::MatrixXd storage_reserve_credit(const SystemCase& c, const RobustSchedule& s, const PriceSet& p);

// Psi: charge on the bound L*u in both directions, bus x hour.
Eigen::MatrixXd settle_uncertainty(const UncertaintySet& set, const PriceSet& p);

// Per hour: sum Psi - sum Theta (storage credits included when given).
Eigen::VectorXd revenue_residue(const Eigen::MatrixXd& psi, const Eigen::MatrixXd& theta,
                                const Eigen::MatrixXd& storage_theta = {});

struct SettlementReport {
  EnergySettlement energy;
  Eigen::MatrixXd theta, storage_theta, psi;
  Eigen::VectorXd residue;
  Eigen::VectorXd congestion_rent;  // per hour, sum_l sigma_l * base flow_l
};

SettlementReport settle(const SystemCase& c, const UncertaintySet& set, const RobustSchedule& s, const PriceSet& p);

struct SftResult {
  Eigen::VectorXd flows;
  bool feasible = false;
};

// Simultaneous feasibility test of nodal FTR amounts (positive = injection).
// `resolution` is the rounding step of the amounts; each line limit is
// widened by the flow that rounding can induce.
SftResult ftr_sft(const Eigen::VectorXd& portfolio, const Eigen::MatrixXd& sf, const std::vector<Line>& lines,
                  double tol = 1e-6, double resolution = 0.0);

struct FtrAccount {
  Eigen::VectorXd shadow;  // signed total line shadow price
  Eigen::VectorXd ftr_flows, base_flows;
  double credit = 0.0, rent = 0.0, underfunding = 0.0;
};

FtrAccount ftr_settle(const Eigen::VectorXd& portfolio, const Eigen::MatrixXd& sf, const PriceSet& p,
                      const RobustSchedule& s, int t);

struct TraditionalPrices {
  Eigen::VectorXd lmp;                       // hour
  Eigen::VectorXd reserve_up, reserve_down;  // hour; up >= 0 >= down
  Eigen::MatrixXd reserve_q_up, reserve_q_down;  // unit x hour, optimized reserves
  RobustSchedule schedule;
};

// R_up = max total deviation over the set, R_down = -R_up.
TraditionalRequirement requirement_from_set(const UncertaintySet& set);

// Traditional SCUC (no lines, system reserve rows): MIP, then LP with I fixed.
TraditionalPrices traditional_prices(const SystemCase& c, const std::vector<PiecewiseBid<double>>& bids,
                                     const TraditionalRequirement& req, optim::SolverBackend& backend);

}  // namespace umpclear
