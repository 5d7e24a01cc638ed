#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hyperstab/gain_schedule.hpp"
#include "hyperstab/psi_algebra.hpp"

namespace hyperstab {

/// Order, gains, gain exponent and gain schedule of a recursive controller.
struct ControllerSpec {
  int n = 2;
  std::vector<double> lambda{1.0, 2.0};
  int m = 2;
  GainSchedule schedule = GainSchedule::affine();

  friend bool operator==(const ControllerSpec&, const ControllerSpec&) = default;
};

/// Raised for gain configurations the synthesis cannot accept.
class GainConditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct SynthesisOptions {
  /// Accept m < n. Continuous-time theory asks for m >= n.
  bool allow_low_m = false;
  /// Accept equal or decreasing gains, e.g. the all-ones gains of the worked examples.
  bool allow_nonincreasing = false;

  static SynthesisOptions forced() { return {true, true}; }
};

/// Every symbolic object produced by the recursive synthesis.
///
/// sigma[0] = x1, sigma[i+1] = omega[i] + lambda_i psi^(i+1) sigma[i], and the
/// control is u = -Omega - lambda_n psi^m sigma[n-1]. Omega is the drift of
/// sigma_n (its nominal derivative with the x_n' slot removed), so the
/// undisturbed closed loop obeys sigma_n' = -lambda_n psi^m sigma_n exactly.
struct SynthesizedController {
  ControllerSpec spec;
  std::vector<StateLinearForm> sigma;
  std::vector<StateLinearForm> omega;  // n - 1 entries
  StateLinearForm Omega;
  StateLinearForm control;
  PolyMatrix S;
  PolyMatrix S_inv;

  int n() const { return spec.n; }
  /// u(t, x) at the effective (possibly saturated) gain.
  double eval_control(double t, std::span<const double> x) const;
  double eval_control(double t, const Eigen::VectorXd& x) const;
  /// sigma(t) = S(psi(t)) x.
  Eigen::VectorXd sigma_values(double t, const Eigen::VectorXd& x) const;
};

SynthesizedController synthesize(const ControllerSpec& spec, SynthesisOptions options = {});

double eval_control(const SynthesizedController& c, double t, std::span<const double> x);

/// Outcome of checking the gain ratios against the known sufficient conditions.
struct GainReport {
  bool hard_fail = false;               // not strictly increasing, or malformed
  std::vector<std::string> violations;  // closed-form ratio conditions not met
  std::vector<std::string> advisories;

  bool passed() const { return !hard_fail && violations.empty(); }
  std::string summary() const;
};

GainReport validate_gains(const ControllerSpec& spec);

/// Nominal sigma_n' with u substituted, minus (-lambda_n psi^m sigma_n). Zero for a correct synthesis.
StateLinearForm closed_loop_residual(const SynthesizedController& c);

}  // namespace hyperstab
