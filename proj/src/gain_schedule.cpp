#include "hyperstab/gain_schedule.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace hyperstab {

GainSchedule GainSchedule::affine() { return GainSchedule(Kind::AffineTime, 1.0, 1.0); }

GainSchedule GainSchedule::exponential(double a, double alpha) {
  if (!(a > 0.0) || !(alpha > 0.0))
    throw std::invalid_argument("exponential gain requires a > 0 and alpha > 0");
  return GainSchedule(Kind::Exponential, a, alpha);
}

GainSchedule GainSchedule::with_cap(double cap) const {
  if (!(cap > 0.0)) throw std::invalid_argument("gain cap must be positive");
  GainSchedule g = *this;
  g.cap_ = cap;
  return g;
}

GainSchedule GainSchedule::without_cap() const {
  GainSchedule g = *this;
  g.cap_.reset();
  return g;
}

DerivativeClosure GainSchedule::closure() const {
  if (kind_ == Kind::AffineTime) return {1.0, 0.0};
  return {0.0, alpha_};
}

double GainSchedule::raw_value(double t) const {
  if (kind_ == Kind::AffineTime) return 1.0 + t;
  return a_ * std::exp(alpha_ * t);
}

double GainSchedule::value(double t) const {
  const double psi = raw_value(t);
  if (cap_ && psi > *cap_) return *cap_;
  return psi;
}

bool GainSchedule::saturated(double t) const { return cap_ && raw_value(t) > *cap_; }

double GainSchedule::derivative(double t) const {
  if (saturated(t)) return 0.0;
  const auto [c0, c1] = closure();
  return c0 + c1 * raw_value(t);
}

std::string GainSchedule::describe() const {
  std::ostringstream os;
  if (kind_ == Kind::AffineTime)
    os << "psi(t) = 1 + t";
  else
    os << "psi(t) = " << a_ << " * exp(" << alpha_ << " t)";
  if (cap_) os << ", capped at " << *cap_;
  return os.str();
}

double psi_value(const GainSchedule& schedule, double t) { return schedule.value(t); }
double psi_derivative(const GainSchedule& schedule, double t) { return schedule.derivative(t); }

}  // namespace hyperstab
