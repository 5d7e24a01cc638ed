#pragma once

#include <array>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hyperstab/disturbance.hpp"
#include "hyperstab/trajectory.hpp"

namespace hyperstab {

/// Adaptive Simpson quadrature of f over [a, b] to an absolute tolerance.
/// b < a integrates with the usual orientation sign.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol = 1e-10,
                        int max_depth = 50);

class AdmissibilityError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// r_{a,alpha}; requires a * alpha > 1.
double lemma1_r(double a, double alpha);
/// The same closed form without the admissibility check (the integral runs backwards when a * alpha < 1).
double lemma1_r_formula(double a, double alpha);
/// int_0^tau e^{s - tau} (a s + 1)^{-alpha} ds.
double lemma1_lhs(double a, double alpha, double tau);

struct Lemma1Check {
  double r = 0.0;
  double max_violation = 0.0;  // max of lhs - r / (a tau + 1)^alpha
  double worst_tau = 0.0;
};
Lemma1Check lemma1_check(double a, double alpha, const std::vector<double>& tau_grid);

/// One r constant requested by the third-order bound.
struct RConstant {
  std::string label;  // e.g. "r(5/l3, 1/5)"
  double a = 0.0;
  double alpha = 0.0;
  double value = 0.0;
  bool admissible = false;
};

/// Gain-dependent constants of the third-order x1/x2 bounds (psi = 1 + t, m = 4).
struct Theorem2Constants {
  double l1 = 0.0, l2 = 0.0, l3 = 0.0;
  std::vector<RConstant> r;
  /// Set when any r constant is inadmissible; the bound is then only advisory.
  bool advisory = false;

  double get(const std::string& label) const;
  std::vector<std::string> inadmissible() const;
};

/// Throws GainConditionError unless 2 l2 > 3 l1 and 3 l3 > 5 l2.
Theorem2Constants theorem2_constants(const std::array<double, 3>& lambda);

struct Theorem2Coefficients {
  std::array<double, 3> A{}, B{}, C{}, D{};
};
Theorem2Coefficients theorem2_coefficients(const Theorem2Constants& k, double t);

struct Theorem2Inputs {
  double x1_0 = 0.0;
  double sigma2_0 = 0.0;
  double sigma3_0 = 0.0;
  std::array<double, 3> d_norms{};
};

double theorem2_x1_bound(const Theorem2Constants& k, double t, const Theorem2Inputs& in);
double theorem2_x2_bound(const Theorem2Constants& k, double t, const Theorem2Inputs& in);

/// e^{-(kappa_coeff t + kappa0) t} rho_scale ||x0||.
struct EnvelopeSpec {
  double kappa0 = 0.0;
  double kappa_coeff = 0.0;
  double rho_scale = 1.0;
};

struct EnvelopeReport {
  /// max over t >= t_min of log|x_c(t)| - log envelope; -inf when the component is identically zero.
  double margin = 0.0;
  double worst_t = 0.0;
  std::size_t points = 0;
  bool passed() const { return margin <= 0.0; }
};

/// Throws std::invalid_argument for a trajectory recorded with a nonzero disturbance.
EnvelopeReport envelope_check(const Trajectory& traj, int component, const EnvelopeSpec& env, double t_min);

/// sup over the window of |x1|, |x2 + d1|, |x3 + d2 + d1'|, ... (entry i: x_{i+1} + sum_j d_j^{(i-j)}).
std::vector<double> steady_state_residuals(const Trajectory& traj, const DisturbanceSpec& dist,
                                           std::pair<double, double> window);

/// Pointwise residual vector at one record index.
std::vector<double> residuals_at(const Trajectory& traj, const DisturbanceSpec& dist, std::size_t k);

}  // namespace hyperstab
