#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace hyperstab {

struct TrajectoryMeta {
  std::string mode = "ct";  // "ct" or "dt"
  std::uint64_t seed = 0;
  double U = 0.0;
  bool disturbance_free = true;
  std::uint64_t steps = 0;
  std::uint64_t rhs_evals = 0;
  double min_step = 0.0;
  double max_step = 0.0;
  std::string spec_hash;
};

/// Time-indexed record of a closed-loop run.
struct Trajectory {
  int n = 0;
  std::vector<double> times;
  std::vector<Eigen::VectorXd> states;
  std::vector<double> controls;
  std::vector<Eigen::VectorXd> sigmas;
  std::vector<Eigen::VectorXd> dists;
  TrajectoryMeta meta;

  std::size_t size() const { return times.size(); }
  bool empty() const { return times.empty(); }
  void reserve(std::size_t k);
  void push(double t, const Eigen::VectorXd& x, double u, const Eigen::VectorXd& sigma, const Eigen::VectorXd& d);

  /// Index of the record point closest to t.
  std::size_t nearest(double t) const;
  /// Checks strictly increasing times and uniform record dimensions.
  void validate() const;
};

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

std::string csv_header(int n);
void write_csv(std::ostream& os, const Trajectory& traj);
void write_csv(const std::string& path, const Trajectory& traj);
Trajectory read_csv(const std::string& path);

}  // namespace hyperstab
