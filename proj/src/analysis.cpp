#include "hyperstab/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hyperstab/controller.hpp"

namespace hyperstab {

namespace {

double simpson_step(const std::function<double(double)>& f, double a, double fa, double b, double fb, double m,
                    double fm, double whole, double tol, int depth) {
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return simpson_step(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
         simpson_step(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol, int max_depth) {
  if (a == b) return 0.0;
  if (b < a) return -adaptive_simpson(f, b, a, tol, max_depth);
  // Presplit so that narrow features inside long intervals are not skipped.
  const int pieces = std::max(1, static_cast<int>(std::ceil(b - a)));
  double sum = 0.0;
  for (int p = 0; p < pieces; ++p) {
    const double lo = a + (b - a) * p / pieces;
    const double hi = (p + 1 == pieces) ? b : a + (b - a) * (p + 1) / pieces;
    const double m = 0.5 * (lo + hi);
    const double flo = f(lo), fhi = f(hi), fm = f(m);
    const double whole = (hi - lo) / 6.0 * (flo + 4.0 * fm + fhi);
    sum += simpson_step(f, lo, flo, hi, fhi, m, fm, whole, tol / pieces, max_depth);
  }
  return sum;
}

double lemma1_r_formula(double a, double alpha) {
  const double aa = a * alpha;
  const double upper = (aa - 1.0) / a;
  const double scale = std::pow(aa, alpha);
  // Tolerance on the integral is scaled so the 1e-10 target holds for r itself.
  const double integral = adaptive_simpson(
      [&](double s) { return std::exp(s - upper) * std::pow(a * s + 1.0, -alpha); }, 0.0, upper,
      1e-10 / std::max(1.0, scale));
  return scale * integral + (aa + 1.0) + std::pow((aa + 1.0) / aa, alpha) * (1.0 - std::exp(-1.0 / a));
}

double lemma1_r(double a, double alpha) {
  if (!(a > 0.0) || !(alpha > 0.0)) throw AdmissibilityError("lemma constant needs a > 0 and alpha > 0");
  if (!(a * alpha > 1.0))
    throw AdmissibilityError("lemma constant needs a * alpha > 1 (got " + std::to_string(a * alpha) + ")");
  return lemma1_r_formula(a, alpha);
}

double lemma1_lhs(double a, double alpha, double tau) {
  return adaptive_simpson([&](double s) { return std::exp(s - tau) * std::pow(a * s + 1.0, -alpha); }, 0.0, tau);
}

Lemma1Check lemma1_check(double a, double alpha, const std::vector<double>& tau_grid) {
  Lemma1Check c;
  c.r = lemma1_r(a, alpha);
  c.max_violation = -std::numeric_limits<double>::infinity();
  for (double tau : tau_grid) {
    const double v = lemma1_lhs(a, alpha, tau) - c.r / std::pow(a * tau + 1.0, alpha);
    if (v > c.max_violation) {
      c.max_violation = v;
      c.worst_tau = tau;
    }
  }
  return c;
}

double Theorem2Constants::get(const std::string& label) const {
  for (const auto& c : r)
    if (c.label == label) return c.value;
  throw std::out_of_range("unknown r constant " + label);
}

std::vector<std::string> Theorem2Constants::inadmissible() const {
  std::vector<std::string> out;
  for (const auto& c : r)
    if (!c.admissible) out.push_back(c.label);
  return out;
}

Theorem2Constants theorem2_constants(const std::array<double, 3>& lambda) {
  Theorem2Constants k;
  k.l1 = lambda[0];
  k.l2 = lambda[1];
  k.l3 = lambda[2];
  if (!(k.l1 > 0.0 && k.l2 > 0.0 && k.l3 > 0.0)) throw GainConditionError("gains must be positive");
  if (!(2.0 * k.l2 > 3.0 * k.l1)) throw GainConditionError("bound requires 2 lambda2 > 3 lambda1");
  if (!(3.0 * k.l3 > 5.0 * k.l2)) throw GainConditionError("bound requires 3 lambda3 > 5 lambda2");

  struct Req {
    const char* base;
    double a;
    double num, den;
  };
  const double a5 = 5.0 / k.l3, a3 = 3.0 / k.l2, a2 = 2.0 / k.l1;
  const Req reqs[] = {
      {"5/l3", a5, 1, 5}, {"5/l3", a5, 2, 5}, {"5/l3", a5, 3, 5}, {"5/l3", a5, 4, 5},
      {"3/l2", a3, 1, 3}, {"3/l2", a3, 2, 3}, {"3/l2", a3, 1, 1}, {"3/l2", a3, 4, 3},
      {"3/l2", a3, 5, 3}, {"3/l2", a3, 2, 1}, {"2/l1", a2, 1, 2}, {"2/l1", a2, 3, 2},
      {"2/l1", a2, 2, 1}, {"2/l1", a2, 5, 2}, {"2/l1", a2, 3, 1}, {"2/l1", a2, 7, 2},
  };
  for (const auto& q : reqs) {
    RConstant c;
    const auto num = static_cast<int>(q.num), den = static_cast<int>(q.den);
    c.label = std::string("r(") + q.base + ", " + std::to_string(num) + (den == 1 ? "" : "/" + std::to_string(den)) + ")";
    c.a = q.a;
    c.alpha = q.num / q.den;
    c.admissible = c.a * c.alpha > 1.0;
    c.value = lemma1_r_formula(c.a, c.alpha);
    if (!c.admissible) k.advisory = true;
    k.r.push_back(c);
  }
  return k;
}

Theorem2Coefficients theorem2_coefficients(const Theorem2Constants& k, double t) {
  const double l1 = k.l1, l2 = k.l2, l3 = k.l3;
  const double psi = 1.0 + t;
  auto R = [&](const char* label) { return k.get(label); };
  const double E1 = std::exp(-l1 * t * (t + 2.0) / 2.0);
  const double E2 = std::exp(-l2 * t * (t * t / 3.0 + t + 1.0));
  const double g21 = 2.0 * l2 - 3.0 * l1;
  const double g32 = 3.0 * l3 - 5.0 * l2;

  const double r5_1 = R("r(5/l3, 1/5)"), r5_2 = R("r(5/l3, 2/5)"), r5_3 = R("r(5/l3, 3/5)"), r5_4 = R("r(5/l3, 4/5)");
  const double r3_1_3 = R("r(3/l2, 1/3)"), r3_2_3 = R("r(3/l2, 2/3)"), r3_1 = R("r(3/l2, 1)");
  const double r3_4_3 = R("r(3/l2, 4/3)"), r3_5_3 = R("r(3/l2, 5/3)"), r3_2 = R("r(3/l2, 2)");
  const double r2_1_2 = R("r(2/l1, 1/2)"), r2_3_2 = R("r(2/l1, 3/2)"), r2_2 = R("r(2/l1, 2)");
  const double r2_5_2 = R("r(2/l1, 5/2)"), r2_3 = R("r(2/l1, 3)"), r2_7_2 = R("r(2/l1, 7/2)");
  auto P = [&](int k_) { return std::pow(psi, k_); };

  Theorem2Coefficients c;
  c.A[0] = E1;
  c.A[1] = 3.0 * E1 / g21;
  c.A[2] = 15.0 * E1 / (g32 * g21);
  c.B[0] = (l2 * r5_1 * r3_1 * r2_2 / P(4) + r5_4 * r3_2 * r2_7_2 / P(7) + l3 * r3_1_3 * r2_1_2 / psi +
            l2 * l3 * r2_1_2 / (l1 * psi)) /
           (l3 * l2);
  c.B[1] = (l1 * r5_3 * r3_5_3 * r2_3 / P(6) + l2 * r5_2 * r3_4_3 * r2_5_2 / P(5) + l3 * r3_2_3 * r2_3_2 / P(3)) /
           (l2 * l3 * l1);
  c.B[2] = r5_4 * r3_2 * r2_7_2 / (l1 * l2 * l3 * P(7));

  c.C[0] = l1 * psi * E1;
  c.C[1] = E2 + l1 * psi * 3.0 * E1 / g21;
  c.C[2] = 5.0 * E2 / g32 + 15.0 * l1 * psi * E1 / (g32 * g21);
  c.D[0] = l1 / (l3 * l2) *
           (l2 * r5_1 * r3_1 / P(3) + r5_4 * r3_2 / P(6) + l3 * r3_1_3 / psi + l2 * r5_1 * r3_1 * r2_2 / P(3) +
            r5_4 * r3_2 * r2_7_2 / P(6) + l3 * r3_1_3 * r2_1_2 + l2 * l3 * r2_1_2 / l1);
  c.D[1] = (l1 * r5_3 * r3_5_3 / P(5) + l2 * r5_2 * r3_4_3 / P(4) + l3 * r3_2_3 / P(2) +
            l1 * r5_3 * r3_5_3 * r2_3 / P(5) + l2 * r5_2 * r3_4_3 * r2_5_2 / P(4) + l3 * r3_2_3 * r2_3_2 / P(2)) /
           (l2 * l3);
  c.D[2] = r5_4 * r3_2 / (l2 * l3 * P(6)) * (1.0 + r2_7_2);
  return c;
}

double theorem2_x1_bound(const Theorem2Constants& k, double t, const Theorem2Inputs& in) {
  const Theorem2Coefficients c = theorem2_coefficients(k, t);
  return c.A[0] * std::abs(in.x1_0) + c.A[1] * std::abs(in.sigma2_0) + c.A[2] * std::abs(in.sigma3_0) +
         c.B[0] * in.d_norms[0] + c.B[1] * in.d_norms[1] + c.B[2] * in.d_norms[2];
}

double theorem2_x2_bound(const Theorem2Constants& k, double t, const Theorem2Inputs& in) {
  const Theorem2Coefficients c = theorem2_coefficients(k, t);
  return c.C[0] * std::abs(in.x1_0) + c.C[1] * std::abs(in.sigma2_0) + c.C[2] * std::abs(in.sigma3_0) +
         c.D[0] * in.d_norms[0] + c.D[1] * in.d_norms[1] + c.D[2] * in.d_norms[2];
}

EnvelopeReport envelope_check(const Trajectory& traj, int component, const EnvelopeSpec& env, double t_min) {
  if (!traj.meta.disturbance_free) throw std::invalid_argument("envelope check needs a disturbance-free trajectory");
  if (component < 0 || component >= traj.n) throw std::out_of_range("component index out of range");
  EnvelopeReport r;
  r.margin = -std::numeric_limits<double>::infinity();
  if (traj.empty()) return r;
  const double x0 = traj.states.front().norm();
  const double log_scale = std::log(env.rho_scale * x0);
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const double t = traj.times[k];
    if (t < t_min) continue;
    ++r.points;
    const double v = std::abs(traj.states[k](component));
    if (v == 0.0) continue;
    const double m = std::log(v) - (log_scale - (env.kappa_coeff * t + env.kappa0) * t);
    if (m > r.margin) {
      r.margin = m;
      r.worst_t = t;
    }
  }
  return r;
}

std::vector<double> residuals_at(const Trajectory& traj, const DisturbanceSpec& dist, std::size_t k) {
  const int n = traj.n;
  const double t = traj.times[k];
  std::vector<double> r(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    double v = traj.states[k](i);
    // x_{i+1} tracks -(d_i + d_{i-1}' + ... + d_1^{(i-1)}).
    for (int j = 0; j < i; ++j) v += dist.derivative(j, i - 1 - j, t);
    r[static_cast<std::size_t>(i)] = std::abs(v);
  }
  return r;
}

std::vector<double> steady_state_residuals(const Trajectory& traj, const DisturbanceSpec& dist,
                                           std::pair<double, double> window) {
  const auto [ta, tb] = window;
  if (traj.empty()) throw std::out_of_range("empty trajectory");
  const double slack = 1e-9 * std::max(1.0, std::abs(traj.times.back()));
  if (!(tb > ta) || ta < traj.times.front() - slack || tb > traj.times.back() + slack)
    throw std::out_of_range("residual window outside trajectory span");
  if (dist.dim() != traj.n) throw std::invalid_argument("disturbance dimension mismatch");
  std::vector<double> sup(static_cast<std::size_t>(traj.n), 0.0);
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const double t = traj.times[k];
    if (t < ta - slack || t > tb + slack) continue;
    const auto r = residuals_at(traj, dist, k);
    for (std::size_t i = 0; i < r.size(); ++i) sup[i] = std::max(sup[i], r[i]);
  }
  return sup;
}

}  // namespace hyperstab
