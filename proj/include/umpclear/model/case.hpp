#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <vector>

namespace umpclear {

// Bus indices are 0-based in memory and 1-based in case files.
struct Unit {
  std::string id;
  int bus = 0;
  double p_min = 0.0, p_max = 0.0, p0 = 0.0;
  double cost_a = 0.0, cost_b = 0.0, cost_c = 0.0;
  double ramp_up = 0.0, ramp_down = 0.0;
  double startup_cost = 0.0, shutdown_cost = 0.0;
  int min_on = 1, min_off = 1;
  int t0 = 0;  // >0 hours already on, <0 hours already off

  [[nodiscard]] bool initially_on() const { return t0 > 0; }
};

struct Line {
  std::string id;
  int from_bus = 0, to_bus = 0;
  double reactance = 0.0;
  double capacity = 0.0;
};

struct LoadModel {
  Eigen::VectorXd base;          // MW per hour
  Eigen::VectorXd distribution;  // fraction per bus
};

struct StorageDevice {
  std::string id;
  int bus = 0;
  double e_max = 0.0, e0 = 0.0;
  double charge_rate = 0.0, discharge_rate = 0.0;
  double eff_charge = 1.0, eff_discharge = 1.0;
};

struct SystemCase {
  std::string name;
  int num_buses = 0;
  int horizon = 0;
  double dt = 1.0;
  std::vector<Unit> units;
  std::vector<Line> lines;
  LoadModel load;
  Eigen::MatrixXd bounds;  // uncertainty bound per bus x hour
  std::vector<StorageDevice> storage;
};

class CaseParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class CaseValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

SystemCase load_case(const std::string& text);
SystemCase load_case_file(const std::string& path);

// Throws CaseValidationError naming the offending unit/line.
void validate(const SystemCase& c);

// Load at each bus for hour t (0-based).
Eigen::VectorXd bus_loads(const SystemCase& c, int t);

}  // namespace umpclear
