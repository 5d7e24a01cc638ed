#include "hyperstab/dt_sim.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace hyperstab {

DtSystem::DtSystem(const ControllerSpec& spec, double h, SynthesisOptions options)
    : ctrl_(synthesize(spec, options)), sys_(build_sigma_system(ctrl_)), h_(h) {
  if (spec.m != spec.n) throw std::invalid_argument("discrete-time scheme requires m == n");
  if (!(h > 0.0) || !std::isfinite(h)) throw std::invalid_argument("step h must be positive");
}

Eigen::VectorXd DtSystem::rho(double t) const {
  const double psi = spec().schedule.value(t);
  Eigen::VectorXd r(n());
  double p = 1.0;
  for (int i = 0; i < n(); ++i) {
    p *= psi;
    r(i) = 1.0 + h_ * spec().lambda[static_cast<std::size_t>(i)] * p;
  }
  return r;
}

Eigen::MatrixXd DtSystem::resolvent(double t) const {
  const Eigen::VectorXd r = rho(t);
  Eigen::MatrixXd Z = Eigen::MatrixXd::Zero(n(), n());
  for (int i = 0; i < n(); ++i) {
    Z(i, i) = 1.0 / r(i);
    for (int j = i + 1; j < n(); ++j) Z(i, j) = Z(i, j - 1) * h_ / r(j);
  }
  return Z;
}

Eigen::MatrixXd DtSystem::S_at(double t) const { return ctrl_.S.eval(spec().schedule.value(t)); }
Eigen::MatrixXd DtSystem::L_at(double t) const { return sys_.L.eval(spec().schedule.value(t)); }

Eigen::VectorXd DtSystem::sigma_step(const Eigen::VectorXd& zeta, long long k, const Eigen::VectorXd& d_next) const {
  const double t1 = time(k + 1);
  return resolvent(t1) * (zeta + h_ * (L_at(t1) * d_next));
}

Eigen::VectorXd DtSystem::state_step(const Eigen::VectorXd& xi, long long k, const Eigen::VectorXd& d_next) const {
  const double t1 = time(k + 1);
  const Eigen::MatrixXd S = S_at(t1);
  const Eigen::VectorXd zeta = sigma_step(S * xi, k, d_next);
  return S.triangularView<Eigen::UnitLower>().solve(zeta);
}

Trajectory simulate_dt(const DtSystem& sys, const DisturbanceSpec& dist, const Eigen::VectorXd& x0, double t_final) {
  const int n = sys.n();
  if (x0.size() != n) throw std::invalid_argument("x0 has wrong dimension");
  if (dist.dim() != n) throw std::invalid_argument("disturbance has wrong number of channels");
  if (!(t_final > 0.0)) throw std::invalid_argument("t_final must be positive");
  const auto K = static_cast<long long>(std::llround(t_final / sys.h()));

  Trajectory traj;
  traj.n = n;
  traj.reserve(static_cast<std::size_t>(K) + 1);
  traj.meta.mode = "dt";
  traj.meta.seed = dist.seed;
  traj.meta.U = dist.U;
  traj.meta.disturbance_free = dist.is_zero();
  traj.meta.min_step = sys.h();
  traj.meta.max_step = sys.h();

  const SynthesizedController& c = sys.controller();
  Eigen::VectorXd xi = x0;
  for (long long k = 0;; ++k) {
    const double t = sys.time(k);
    traj.push(t, xi, c.eval_control(t, xi), c.sigma_values(t, xi), dist.value(t));
    if (k == K) break;
    xi = sys.state_step(xi, k, dist.value(sys.time(k + 1)));
    if (!xi.allFinite()) throw std::runtime_error("non-finite state at step " + std::to_string(k + 1));
    traj.meta.steps += 1;
  }
  return traj;
}

std::vector<double> dt_contraction_ratios(const DtSystem& sys, const Eigen::VectorXd& zeta0, long long steps) {
  std::vector<double> ratios;
  ratios.reserve(static_cast<std::size_t>(steps));
  const Eigen::VectorXd zero_d = Eigen::VectorXd::Zero(sys.n());
  Eigen::VectorXd z = zeta0;
  double norm = z.norm();
  if (norm == 0.0) return std::vector<double>(static_cast<std::size_t>(steps), 0.0);
  z /= norm;
  for (long long k = 0; k < steps; ++k) {
    Eigen::VectorXd next = sys.sigma_step(z, k, zero_d);
    const double r = next.norm();
    ratios.push_back(r);
    if (r == 0.0) break;
    z = next / r;
  }
  return ratios;
}

Eigen::MatrixXd nilpotent_limit(int n, double h) {
  Eigen::MatrixXd N = Eigen::MatrixXd::Zero(n, n);
  if (n < 2) return N;
  const double scale = -1.0 / std::pow(h, n - 1);
  // Subdiagonal k (k = 1..n-1) carries h^{n-1-k}.
  for (int k = 1; k < n; ++k)
    for (int i = k; i < n; ++i) N(i, i - k) = scale * std::pow(h, n - 1 - k);
  return N;
}

double limit_deviation(const Eigen::MatrixXd& P, const Eigen::MatrixXd& N) {
  const double nmax = N.cwiseAbs().maxCoeff();
  double dev = 0.0;
  for (int i = 0; i < N.rows(); ++i)
    for (int j = 0; j < N.cols(); ++j) {
      double e;
      if (N(i, j) != 0.0)
        e = std::abs(P(i, j) - N(i, j)) / std::abs(N(i, j));
      else
        e = std::abs(P(i, j)) / (nmax > 0.0 ? nmax : 1.0);
      dev = std::max(dev, e);
    }
  return dev;
}

namespace {

// S entries reach psi^(2n-2) at large t, so the products cancel far below double precision.
using Wide = boost::multiprecision::cpp_bin_float_100;
using WideMatrix = Eigen::Matrix<Wide, Eigen::Dynamic, Eigen::Dynamic>;

WideMatrix eval_wide(const PolyMatrix& p, const Wide& psi) {
  const int n = p.dim();
  WideMatrix out(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Wide acc = 0;
      const auto c = p(i, j).coeffs();
      for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * psi + Wide(*it);
      out(i, j) = acc;
    }
  return out;
}

Eigen::MatrixXd to_double(const WideMatrix& m) {
  Eigen::MatrixXd out(m.rows(), m.cols());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) out(i, j) = static_cast<double>(m(i, j));
  return out;
}

}  // namespace

LimitReport limit_matrices(const DtSystem& sys, double t_probe) {
  const int n = sys.n();
  const SigmaSystem& ss = sys.sigma_system();
  const Wide psi = ss.schedule.value(t_probe);
  const Wide h = sys.h();
  const WideMatrix S = eval_wide(sys.controller().S, psi);
  const WideMatrix L = eval_wide(ss.L, psi);

  std::vector<Wide> rho(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const int p = i + 1 == n ? ss.m : i + 1;
    rho[static_cast<std::size_t>(i)] = 1 + h * Wide(ss.lambda[static_cast<std::size_t>(i)]) * boost::multiprecision::pow(psi, p);
  }
  WideMatrix Z = WideMatrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    Z(i, i) = 1 / rho[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < n; ++j) Z(i, j) = Z(i, j - 1) * h / rho[static_cast<std::size_t>(j)];
  }
  const auto Sl = S.triangularView<Eigen::UnitLower>();
  const WideMatrix ZS = Z * S;
  const WideMatrix ZL = Z * L;

  LimitReport r;
  r.SZS = to_double(Sl.solve(ZS));
  r.SZL = to_double(Sl.solve(ZL));
  r.N = nilpotent_limit(n, sys.h());
  r.dev_SZS = limit_deviation(r.SZS, r.N);
  r.dev_SZL = limit_deviation(r.SZL, r.N);
  return r;
}

ScalarDtResult scalar_dt_demo(double x0, const std::vector<double>& d, int K) {
  if (K < 1) throw std::invalid_argument("K must be >= 1");
  if (static_cast<int>(d.size()) < K) throw std::invalid_argument("need d_0..d_{K-1}");
  ScalarDtResult r;
  for (int k = 0; k < K; ++k) r.d_norm = std::max(r.d_norm, std::abs(d[static_cast<std::size_t>(k)]));
  r.x.push_back(x0);
  r.bound.push_back(std::abs(x0));
  r.max_violation = -std::numeric_limits<double>::infinity();
  double fact = 1.0;
  double geo = 0.0;
  for (int k = 0; k < K; ++k) {
    r.x.push_back((r.x.back() + d[static_cast<std::size_t>(k)]) / (1.0 + k));
    const int kk = k + 1;
    fact *= kk;
    geo += std::ldexp(1.0, -(kk - 2));
    const double b = std::abs(x0) / fact + r.d_norm / kk * geo;
    r.bound.push_back(b);
    r.max_violation = std::max(r.max_violation, std::abs(r.x.back()) - b);
  }
  return r;
}

}  // namespace hyperstab
