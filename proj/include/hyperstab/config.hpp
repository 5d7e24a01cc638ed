#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hyperstab/controller.hpp"
#include "hyperstab/disturbance.hpp"

namespace hyperstab {

/// Parse or validation failure; line is 0 when the problem is not tied to a line.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(int line, std::string field, const std::string& what);
  int line() const { return line_; }
  const std::string& field() const { return field_; }
  /// Message without the line/field prefix.
  const std::string& detail() const { return detail_; }

 private:
  int line_;
  std::string field_;
  std::string detail_;
};

enum class SimMode { Ct, Dt };

/// Everything needed to reproduce one run (or one sweep grid).
///
/// Text format: one `key = value` per line, `#` starts a comment, arrays as `[a, b, c]`.
///   mode               ct | dt
///   controller.n       order of the integrator chain
///   controller.lambda  gains, one per order
///   controller.m       exponent of the last gain
///   gain.kind          affine (psi = 1 + t) | exp (psi = a e^{alpha t})
///   gain.a, gain.alpha exponential parameters (dimensionless, 1/s)
///   gain.cap           saturation level for psi, or `none`
///   disturbance.seed   seed of the uniform draw used by `rnd`
///   disturbance.dK     channel K expression in t (seconds), e.g. `cos(3*t) - rnd`
///   sim.h              implicit Euler step in seconds (dt mode)
///   sim.record_dt      record spacing in seconds (ct mode)
///   sim.t_final        horizon in seconds
///   sim.x0             initial state
///   output.dir         output directory
///   sweep.lambda_ratio successive gain ratios lambda_{i+1}/lambda_i to sweep
///   sweep.cap          caps to sweep (`none` for no cap)
///   sweep.h            dt steps to sweep against a ct reference
///   verify.tol         optional residual tolerances for `verify residuals`
///   verify.t_probe     probe time for `verify limits`
struct ExperimentConfig {
  SimMode mode = SimMode::Ct;
  ControllerSpec controller;
  DisturbanceSpec disturbance = DisturbanceSpec::zero(2);
  double h = 1e-3;
  double record_dt = 0.01;
  double t_final = 5.0;
  Eigen::VectorXd x0 = Eigen::VectorXd::Zero(2);
  std::string output_dir = "out";

  std::vector<double> sweep_lambda_ratio;
  std::vector<std::optional<double>> sweep_cap;
  std::vector<double> sweep_h;
  std::vector<double> verify_tol;
  double verify_t_probe = 1e4;

  /// Throws ConfigError when fields are inconsistent (sizes, signs).
  void validate() const;
  void set_seed(std::uint64_t seed) { disturbance.reseed(seed); }
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);
std::string to_config_text(const ExperimentConfig& cfg);

std::string to_string(SimMode m);

}  // namespace hyperstab
