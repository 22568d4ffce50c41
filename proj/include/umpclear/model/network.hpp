#pragma once

#include "umpclear/model/case.hpp"

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <vector>

namespace umpclear {

class NetworkError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Buses not reachable from `from` through lines.
std::vector<int> isolated_buses(const std::vector<Line>& lines, int num_buses, int from = 0);

// PTDF matrix: SF(l, b) is the flow on line l (from -> to positive) per MW
// injected at b and withdrawn at the slack bus.
template <typename Scalar = double>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> compute_shift_factors(const std::vector<Line>& lines,
                                                                            int num_buses, int slack = 0) {
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  if (slack < 0 || slack >= num_buses) throw NetworkError("slack bus out of range");
  const auto iso = isolated_buses(lines, num_buses, slack);
  if (!iso.empty()) {
    std::string msg = "network is disconnected; isolated buses:";
    for (int b : iso) msg += " " + std::to_string(b + 1);
    throw NetworkError(msg);
  }
  const int nl = static_cast<int>(lines.size());
  Mat a = Mat::Zero(nl, num_buses);  // branch-bus incidence
  Mat bd = Mat::Zero(nl, nl);
  for (int l = 0; l < nl; ++l) {
    if (!(lines[l].reactance > 0.0)) throw NetworkError("line " + lines[l].id + ": reactance must be positive");
    a(l, lines[l].from_bus) = Scalar(1);
    a(l, lines[l].to_bus) = Scalar(-1);
    bd(l, l) = Scalar(1) / Scalar(lines[l].reactance);
  }
  const Mat bbus = a.transpose() * bd * a;
  std::vector<int> keep;
  for (int b = 0; b < num_buses; ++b)
    if (b != slack) keep.push_back(b);
  const int nr = static_cast<int>(keep.size());
  Mat br(nr, nr);
  for (int i = 0; i < nr; ++i)
    for (int j = 0; j < nr; ++j) br(i, j) = bbus(keep[i], keep[j]);
  const Mat inv_r = br.partialPivLu().inverse();
  Mat x = Mat::Zero(num_buses, num_buses);
  for (int i = 0; i < nr; ++i)
    for (int j = 0; j < nr; ++j) x(keep[i], keep[j]) = inv_r(i, j);
  return bd * a * x;
}

}  // namespace umpclear
