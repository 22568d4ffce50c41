#pragma once

#include "umpclear/model/bids.hpp"
#include "umpclear/model/case.hpp"
#include "umpclear/optim/linear_model.hpp"
#include "umpclear/optim/solve.hpp"
#include "umpclear/scuc/schedule.hpp"

#include <Eigen/Dense>

#include <optional>
#include <vector>

namespace umpclear {

struct MasterOptions {
  bool transmission = true;
  int slack_bus = 0;
  bool storage = true;  // attach the case's storage devices
  // Fixes I as constants (RSCED); the model is then a pure LP.
  std::optional<Eigen::MatrixXi> fixed_commitment;
  // Storage indicators fixed alongside: rows (2d, 2d+1) = (discharging, charging) of device d.
  std::optional<Eigen::MatrixXi> fixed_storage_modes;
};

// Variable/row indices of one storage device; -1 where absent.
struct StorageLayout {
  int device = 0;
  std::vector<int> energy, discharge, charge, discharging, charging;
  std::vector<std::vector<int>> scen_discharge, scen_charge;  // [k][t]
};

struct ScenarioBlock {
  Eigen::MatrixXi p;                   // unit x hour
  std::vector<int> balance;            // hour
  Eigen::MatrixXi line_up, line_down;  // line x hour
  Eigen::MatrixXi dev_up, dev_down;    // unit x hour
  Eigen::MatrixXi cap_up, cap_down;    // unit x hour: p <= I p_max, p >= I p_min
};

struct MasterLayout {
  Eigen::MatrixXi commit, startup, shutdown;  // unit x hour
  std::vector<std::vector<std::vector<int>>> seg;  // [unit][hour][segment]
  std::vector<int> balance;
  Eigen::MatrixXi line_up, line_down;  // line x hour, -1 without transmission
  std::vector<ScenarioBlock> scenarios;
  std::vector<StorageLayout> storage;
};

struct MasterModel {
  optim::LinearModel model;
  MasterLayout layout;
  Eigen::MatrixXd sf;  // line x bus; empty without transmission
  std::vector<Scenario> pool;
  MasterOptions options;
};

// Robust SCUC master: commitment, base dispatch on bid segments, DC line
// limits, and one recourse block per scenario. Objective is base cost only.
MasterModel build_master(const SystemCase& c, const std::vector<PiecewiseBid<double>>& bids,
                         const std::vector<Scenario>& pool, const MasterOptions& options = {});

// Solve with the selected backend; infeasibility is reported by hour.
optim::SolveResult solve_master(const SystemCase& c, const MasterModel& m, optim::SolverBackend& backend,
                                double gap_tol = 1e-6);

RobustSchedule extract_schedule(const SystemCase& c, const MasterModel& m, const optim::SolveResult& r);

struct Reserve {
  double up = 0.0;
  double down = 0.0;  // <= 0
};
Reserve reserve_capability(double p, int commit, const Unit& unit, double dt = 1.0);

class MasterInfeasibleError : public optim::SolverError {
 public:
  MasterInfeasibleError(const std::string& what, int hour) : SolverError(what), hour_(hour) {}
  [[nodiscard]] int hour() const { return hour_; }

 private:
  int hour_;
};

// System-wide reserve requirements per hour for the traditional model.
struct TraditionalRequirement {
  Eigen::VectorXd up;    // >= 0
  Eigen::VectorXd down;  // <= 0
};

struct TraditionalLayout {
  Eigen::MatrixXi reserve_up, reserve_down;  // unit x hour
  std::vector<int> req_up, req_down;         // hour
};

struct TraditionalModel {
  MasterModel master;  // no lines, no scenarios
  TraditionalLayout layout;
};

TraditionalModel build_traditional(const SystemCase& c, const std::vector<PiecewiseBid<double>>& bids,
                                   const TraditionalRequirement& req,
                                   std::optional<Eigen::MatrixXi> fixed_commitment = std::nullopt);

}  // namespace umpclear
