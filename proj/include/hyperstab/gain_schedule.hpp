#pragma once

#include <optional>
#include <string>

namespace hyperstab {

/// Coefficients (c0, c1) of an affine derivative closure psi' = c0 + c1 * psi.
struct DerivativeClosure {
  double c0 = 0.0;
  double c1 = 0.0;
};

/// Monotone time-varying gain psi(t), optionally clamped at a cap.
///
/// Only schedules whose derivative is affine in psi are representable, so
/// that d/dt p(psi) stays a polynomial in psi for any polynomial p.
class GainSchedule {
 public:
  enum class Kind { AffineTime, Exponential };

  /// psi(t) = 1 + t
  static GainSchedule affine();
  /// psi(t) = a * exp(alpha * t), a > 0, alpha > 0
  static GainSchedule exponential(double a, double alpha);

  /// Returns a copy whose effective value is min(psi(t), cap).
  GainSchedule with_cap(double cap) const;
  GainSchedule without_cap() const;

  Kind kind() const { return kind_; }
  double a() const { return a_; }
  double alpha() const { return alpha_; }
  const std::optional<double>& cap() const { return cap_; }
  DerivativeClosure closure() const;

  /// Unclamped psi(t).
  double raw_value(double t) const;
  /// Effective gain min(psi(t), cap).
  double value(double t) const;
  /// c0 + c1 psi(t) below the cap, 0 once the unclamped value exceeds it.
  double derivative(double t) const;
  bool saturated(double t) const;

  std::string describe() const;

  friend bool operator==(const GainSchedule&, const GainSchedule&) = default;

 private:
  GainSchedule(Kind kind, double a, double alpha) : kind_(kind), a_(a), alpha_(alpha) {}

  Kind kind_ = Kind::AffineTime;
  double a_ = 1.0;
  double alpha_ = 1.0;
  std::optional<double> cap_;
};

double psi_value(const GainSchedule& schedule, double t);
double psi_derivative(const GainSchedule& schedule, double t);

}  // namespace hyperstab
