#include "hyperstab/controller.hpp"

#include <cmath>
#include <sstream>

namespace hyperstab {

namespace {

void check_spec(const ControllerSpec& spec, const SynthesisOptions& options) {
  if (spec.n < 1) throw GainConditionError("controller order n must be >= 1");
  if (static_cast<int>(spec.lambda.size()) != spec.n)
    throw GainConditionError("expected " + std::to_string(spec.n) + " gains, got " +
                             std::to_string(spec.lambda.size()));
  for (double l : spec.lambda)
    if (!(l > 0.0) || !std::isfinite(l)) throw GainConditionError("gains must be positive and finite");
  for (int i = 0; i + 1 < spec.n && !options.allow_nonincreasing; ++i)
    if (!(spec.lambda[static_cast<std::size_t>(i) + 1] > spec.lambda[static_cast<std::size_t>(i)]))
      throw GainConditionError("gains must be strictly increasing (lambda" + std::to_string(i + 2) +
                               " <= lambda" + std::to_string(i + 1) + ")");
  if (spec.m < spec.n && !options.allow_low_m)
    throw GainConditionError("gain exponent m = " + std::to_string(spec.m) + " is below n = " +
                             std::to_string(spec.n) + "; pass allow_low_m to override");
  if (spec.m < 0) throw GainConditionError("gain exponent m must be nonnegative");
}

}  // namespace

SynthesizedController synthesize(const ControllerSpec& spec, SynthesisOptions options) {
  check_spec(spec, options);
  const int n = spec.n;
  const DerivativeClosure closure = spec.schedule.closure();

  SynthesizedController c;
  c.spec = spec;
  c.sigma.push_back(StateLinearForm::state(n, 0));
  for (int i = 1; i < n; ++i) {
    const StateLinearForm& prev = c.sigma.back();
    FormDerivative d = form_nominal_derivative(prev, closure);
    // sigma_i depends on x_1..x_i only, so x_n' never appears before the last step.
    if (!d.input_coeff.is_zero()) throw std::logic_error("input channel reached before the last sigma");
    StateLinearForm next = d.drift + prev * PsiPoly::monomial(spec.lambda[static_cast<std::size_t>(i) - 1], i);
    c.omega.push_back(std::move(d.drift));
    c.sigma.push_back(std::move(next));
  }

  FormDerivative last = form_nominal_derivative(c.sigma.back(), closure);
  if (!last.input_coeff.is_one()) throw std::logic_error("sigma_n must carry x_n with unit coefficient");
  c.Omega = std::move(last.drift);
  c.control = -c.Omega - c.sigma.back() * PsiPoly::monomial(spec.lambda.back(), spec.m);

  c.S = PolyMatrix::from_rows(c.sigma);
  c.S_inv = polymatrix_inverse_unitriangular(c.S);
  return c;
}

double SynthesizedController::eval_control(double t, std::span<const double> x) const {
  return control.eval(spec.schedule.value(t), x);
}

double SynthesizedController::eval_control(double t, const Eigen::VectorXd& x) const {
  return control.eval(spec.schedule.value(t), x);
}

Eigen::VectorXd SynthesizedController::sigma_values(double t, const Eigen::VectorXd& x) const {
  const double psi = spec.schedule.value(t);
  Eigen::VectorXd s(spec.n);
  for (int i = 0; i < spec.n; ++i) s(i) = sigma[static_cast<std::size_t>(i)].eval(psi, x);
  return s;
}

double eval_control(const SynthesizedController& c, double t, std::span<const double> x) {
  return c.eval_control(t, x);
}

StateLinearForm closed_loop_residual(const SynthesizedController& c) {
  FormDerivative d = form_nominal_derivative(c.sigma.back(), c.spec.schedule.closure());
  StateLinearForm closed = d.drift + c.control * d.input_coeff;
  StateLinearForm target = c.sigma.back() * PsiPoly::monomial(-c.spec.lambda.back(), c.spec.m);
  return closed - target;
}

std::string GainReport::summary() const {
  std::ostringstream os;
  os << (hard_fail ? "REJECTED" : (violations.empty() ? "ok" : "flagged"));
  for (const auto& v : violations) os << "; " << v;
  for (const auto& a : advisories) os << "; advisory: " << a;
  return os.str();
}

GainReport validate_gains(const ControllerSpec& spec) {
  GainReport r;
  if (spec.n < 1 || static_cast<int>(spec.lambda.size()) != spec.n) {
    r.hard_fail = true;
    r.violations.push_back("malformed spec: gain count does not match order");
    return r;
  }
  const auto& l = spec.lambda;
  for (double v : l)
    if (!(v > 0.0)) {
      r.hard_fail = true;
      r.violations.push_back("gains must be positive");
      return r;
    }
  for (std::size_t i = 0; i + 1 < l.size(); ++i)
    if (!(l[i + 1] > l[i])) {
      r.hard_fail = true;
      r.violations.push_back("lambda" + std::to_string(i + 2) + " <= lambda" + std::to_string(i + 1));
    }
  if (r.hard_fail) return r;

  if (spec.m < spec.n) r.advisories.push_back("m < n is outside the continuous-time design range");
  if ((spec.n == 2 || spec.n == 3) && !(l[1] > 1.5 * l[0]))
    r.violations.push_back("lambda2 <= 3/2 lambda1 (" + format_coeff(l[1]) + " <= " + format_coeff(1.5 * l[0]) + ")");
  if (spec.n == 3 && !(l[2] > 5.0 / 3.0 * l[1]))
    r.violations.push_back("lambda3 <= 5/3 lambda2 (" + format_coeff(l[2]) + " <= " +
                           format_coeff(5.0 / 3.0 * l[1]) + ")");
  if (spec.n >= 4)
    r.advisories.push_back("no closed-form ratio condition is known for n >= 4; gains must be sufficiently separated");
  return r;
}

}  // namespace hyperstab
