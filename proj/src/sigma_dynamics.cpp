#include "hyperstab/sigma_dynamics.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace hyperstab {

SigmaSystem build_sigma_system(const SynthesizedController& c) {
  const int n = c.n();
  const DerivativeClosure closure = c.spec.schedule.closure();

  SigmaSystem sys;
  sys.n = n;
  sys.lambda = c.spec.lambda;
  sys.m = c.spec.m;
  sys.schedule = c.spec.schedule;
  sys.M = PolyMatrix(n);
  sys.L = PolyMatrix(n);

  for (int i = 0; i < n; ++i) {
    const int power = (i == n - 1) ? c.spec.m : i + 1;
    const double lam = c.spec.lambda[static_cast<std::size_t>(i)];
    sys.M(i, i) = PsiPoly::monomial(-lam, power);
    if (i + 1 < n) sys.M(i, i + 1) = PsiPoly::constant(1.0);

    // Differentiate sigma_i along the disturbed plant with u substituted.
    FormDerivative d = form_nominal_derivative(c.sigma[static_cast<std::size_t>(i)], closure);
    StateLinearForm closed = d.drift;
    if (!d.input_coeff.is_zero()) closed += c.control * d.input_coeff;
    for (int j = 0; j < n; ++j) sys.L(i, j) = d.disturbance[static_cast<std::size_t>(j)];

    StateLinearForm residual = closed + c.sigma[static_cast<std::size_t>(i)] * PsiPoly::monomial(lam, power);
    if (i + 1 < n) residual -= c.sigma[static_cast<std::size_t>(i) + 1];
    const double scale = std::max(1.0, closed.max_abs_coeff());
    if (residual.max_abs_coeff() > kSigmaResidualTol * scale)
      throw std::logic_error("sigma dynamics residual check failed in row " + std::to_string(i + 1) + ": " +
                             to_string(residual));
  }
  if (!sys.L.is_unit_lower_triangular()) throw std::logic_error("derived L is not unit lower triangular");
  return sys;
}

SigmaSystem build_sigma_system(const ControllerSpec& spec, SynthesisOptions options) {
  return build_sigma_system(synthesize(spec, options));
}

Eigen::VectorXd sigma_rhs(const SigmaSystem& sys, double t, const Eigen::VectorXd& sigma,
                          const Eigen::VectorXd& d) {
  if (sigma.size() != sys.n || d.size() != sys.n) throw std::invalid_argument("sigma_rhs: dimension mismatch");
  const double psi = sys.schedule.value(t);
  return sys.M.eval(psi) * sigma + sys.L.eval(psi) * d;
}

}  // namespace hyperstab
