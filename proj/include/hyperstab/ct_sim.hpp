#pragma once

#include <stdexcept>

#include <Eigen/Dense>

#include "hyperstab/controller.hpp"
#include "hyperstab/disturbance.hpp"
#include "hyperstab/trajectory.hpp"

namespace hyperstab {

/// Step size fell below the floor; the gain has outgrown the explicit scheme.
class StiffnessError : public std::runtime_error {
 public:
  StiffnessError(double t, double h);
  double t() const { return t_; }
  double h() const { return h_; }

 private:
  double t_;
  double h_;
};

class SimulationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CtOptions {
  double h_max = 1e-3;
  double c_stab = 0.5;
  double h_min = 1e-12;
  /// Runs whose gain outgrows the horizon would otherwise take ~1/h_min steps before h_min trips.
  std::uint64_t max_steps = 20'000'000;
};

/// min(h_max, c_stab / (lambda_n psi(t)^m)) at the effective gain.
double ct_step_size(const ControllerSpec& spec, double t, const CtOptions& opt = {});

/// Classical RK4 on x' = e_n x + d + b_n u with grid-clipped steps.
Trajectory simulate_ct(const SynthesizedController& c, const DisturbanceSpec& dist, const Eigen::VectorXd& x0,
                       double t_final, double record_dt, const CtOptions& opt = {});

/// Validates the gains first; force skips the check and relaxes synthesis limits.
Trajectory simulate_ct(const ControllerSpec& spec, const DisturbanceSpec& dist, const Eigen::VectorXd& x0,
                       double t_final, double record_dt, bool force = false, const CtOptions& opt = {});

struct ScalarDemoResult {
  Trajectory traj;
  std::vector<double> bound;
  double d_norm = 0.0;
  /// max over the grid of |x| - bound; <= 0 when the bound holds.
  double max_violation = 0.0;
};

/// x' = -(1 + t) x + d(t) against e^{-(t^2/2 + t)}|x0| + 2||d|| / (1 + t^2/2 + t).
ScalarDemoResult scalar_ct_demo(double x0, const ChannelSignal& d, double t_final, double record_dt = 0.01,
                                std::uint64_t seed = 0);

}  // namespace hyperstab
