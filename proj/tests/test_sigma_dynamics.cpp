#include <doctest.h>

#include <random>

#include "fixtures.hpp"
#include "hyperstab/ct_sim.hpp"
#include "hyperstab/sigma_dynamics.hpp"

using namespace hyperstab;

namespace {

ControllerSpec spec_of(int n, std::vector<double> lambda, int m) {
  ControllerSpec s;
  s.n = n;
  s.lambda = std::move(lambda);
  s.m = m;
  return s;
}

double matrix_diff(const PolyMatrix& a, const std::vector<std::vector<oracle::Poly>>& b) {
  double d = 0.0;
  for (int i = 0; i < a.dim(); ++i)
    for (int j = 0; j < a.dim(); ++j) d = std::max(d, oracle::diff(b[i][j], a(i, j)));
  return d;
}

}  // namespace

TEST_CASE("second order disturbance row") {
  const double l1 = 1.7, l2 = 3.1;
  const SigmaSystem s = build_sigma_system(spec_of(2, {l1, l2}, 2));
  CHECK(s.L(1, 0) == PsiPoly{0, l1});
  CHECK(s.L(1, 1) == PsiPoly{1});
  CHECK(s.M(1, 1) == PsiPoly::monomial(-l2, 2));
  CHECK(s.M(0, 0) == PsiPoly::monomial(-l1, 1));
  CHECK(s.M(0, 1) == PsiPoly{1});
}

TEST_CASE("unit-gain fixtures for L and M") {
  const SigmaSystem s3 = build_sigma_system(spec_of(3, {1, 1, 1}, 3), SynthesisOptions::forced());
  CHECK(matrix_diff(s3.L, fixtures::third_order_unit().L) == 0.0);
  const SigmaSystem s4 = build_sigma_system(spec_of(4, {1, 1, 1, 1}, 4), SynthesisOptions::forced());
  CHECK(matrix_diff(s4.L, fixtures::fourth_order_unit().L) == 0.0);
  for (int i = 0; i < 4; ++i) {
    CHECK(s4.M(i, i) == PsiPoly::monomial(-1.0, i + 1));
    for (int j = 0; j < 4; ++j)
      if (j != i && j != i + 1) CHECK(s4.M(i, j).is_zero());
    if (i + 1 < 4) CHECK(s4.M(i, i + 1) == PsiPoly{1});
  }
}

TEST_CASE("structure and degree ladder") {
  for (int n = 2; n <= 6; ++n) {
    std::vector<double> ones(static_cast<std::size_t>(n), 1.0);
    const SigmaSystem s = build_sigma_system(spec_of(n, ones, n), SynthesisOptions::forced());
    CHECK(s.L.is_unit_lower_triangular());
    int max_deg = -1;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) max_deg = std::max(max_deg, s.L(i, j).degree());
    CHECK(s.L(n - 1, 0).degree() == max_deg);
    for (int j = 0; j < n; ++j)
      for (int i = j + 2; i < n; ++i) CHECK(s.L(i, j).degree() > s.L(i - 1, j).degree());
  }
}

TEST_CASE("general gains and last exponent") {
  std::mt19937_64 gen(4);
  std::uniform_real_distribution<double> step(0.2, 1.5);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + trial % 4;
    std::vector<double> l{step(gen)};
    for (int i = 1; i < n; ++i) l.push_back(l.back() + step(gen));
    const int m = n + trial % 2;
    const SigmaSystem s = build_sigma_system(spec_of(n, l, m));
    CHECK(s.M(n - 1, n - 1) == PsiPoly::monomial(-l.back(), m));
    CHECK(s.L.is_unit_lower_triangular());
  }
}

TEST_CASE("sigma_rhs examples") {
  const SigmaSystem s2 = build_sigma_system(spec_of(2, {1, 1}, 2), SynthesisOptions::forced());
  const Eigen::VectorXd z2 = Eigen::VectorXd::Zero(2);
  CHECK(sigma_rhs(s2, 0.0, z2, z2).norm() == 0.0);
  const Eigen::VectorXd r = sigma_rhs(s2, 0.0, Eigen::Vector2d(1, 1), z2);
  CHECK(r(0) == 0.0);
  CHECK(r(1) == -1.0);

  const SigmaSystem s3 = build_sigma_system(spec_of(3, {1, 1, 1}, 3), SynthesisOptions::forced());
  const Eigen::VectorXd r3 = sigma_rhs(s3, 1.0, Eigen::Vector3d(0, 0, 1), Eigen::VectorXd::Zero(3));
  CHECK(r3(0) == 0.0);
  CHECK(r3(1) == 1.0);
  CHECK(r3(2) == -8.0);
  CHECK_THROWS_AS(sigma_rhs(s3, 0.0, Eigen::Vector2d(1, 1), Eigen::VectorXd::Zero(3)), std::invalid_argument);
}

TEST_CASE("coordinates and finite differences along simulated runs") {
  const ControllerSpec spec = spec_of(3, {1, 2, 4}, 3);
  const SynthesizedController c = synthesize(spec);
  const SigmaSystem sys = build_sigma_system(c);
  DisturbanceSpec d = DisturbanceSpec::zero(3);
  d.channels[0] = parse_channel("0.5*sin(2*t)");
  d.channels[1] = parse_channel("0.3*cos(t)");
  d.channels[2] = parse_channel("0.2 - 0.4*rnd");
  d.reseed(9);
  const double dt = 1e-3;
  const Trajectory tr = simulate_ct(c, d, Eigen::Vector3d(0.5, -0.2, 0.1), 3.0, dt);
  double worst_coord = 0.0, worst_fd = 0.0;
  for (std::size_t k = 1; k + 1 < tr.size(); ++k) {
    const Eigen::VectorXd s = c.S.eval(spec.schedule.value(tr.times[k])) * tr.states[k];
    worst_coord = std::max(worst_coord, (s - tr.sigmas[k]).norm() / std::max(1e-12, s.norm()));
    const Eigen::VectorXd fd = (tr.sigmas[k + 1] - tr.sigmas[k - 1]) / (2 * dt);
    const Eigen::VectorXd rhs = sigma_rhs(sys, tr.times[k], tr.sigmas[k], d.value(tr.times[k]));
    worst_fd = std::max(worst_fd, (fd - rhs).norm() / std::max(1.0, rhs.norm()));
  }
  CHECK(worst_coord < 1e-9);
  CHECK(worst_fd < 1e-3);
}
