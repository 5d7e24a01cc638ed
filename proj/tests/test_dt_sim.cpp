#include <doctest.h>

#include <cmath>
#include <random>

#include "hyperstab/dt_sim.hpp"
#include "hyperstab/experiment.hpp"

using namespace hyperstab;

namespace {

ControllerSpec spec_of(std::vector<double> lambda) {
  ControllerSpec s;
  s.n = static_cast<int>(lambda.size());
  s.lambda = std::move(lambda);
  s.m = s.n;
  return s;
}

ControllerSpec unit(int n) { return spec_of(std::vector<double>(static_cast<std::size_t>(n), 1.0)); }

// Dense (I - h M) assembled straight from the bidiagonal definition.
Eigen::MatrixXd dense_I_minus_hM(const std::vector<double>& lambda, double psi, double h) {
  const int n = static_cast<int>(lambda.size());
  Eigen::MatrixXd A = Eigen::MatrixXd::Identity(n, n);
  for (int i = 0; i < n; ++i) {
    A(i, i) += h * lambda[static_cast<std::size_t>(i)] * std::pow(psi, i + 1);
    if (i + 1 < n) A(i, i + 1) -= h;
  }
  return A;
}

}  // namespace

TEST_CASE("resolvent examples") {
  ControllerSpec s1 = unit(1);
  const DtSystem one(s1, 0.1, SynthesisOptions::forced());
  CHECK(one.resolvent(0.0)(0, 0) == doctest::Approx(1.0 / 1.1).epsilon(1e-15));

  const DtSystem two(spec_of({1, 2}), 0.5);
  const Eigen::MatrixXd Z = two.resolvent(0.0);
  CHECK(Z(0, 0) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(Z(0, 1) == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
  CHECK(Z.isApprox(dense_I_minus_hM({1, 2}, 1.0, 0.5).inverse(), 1e-15));
  CHECK(Z(1, 0) == 0.0);
  CHECK(Z(1, 1) == doctest::Approx(0.5).epsilon(1e-15));

  const double h = 0.01;
  const DtSystem three(unit(3), h, SynthesisOptions::forced());
  const Eigen::VectorXd r = three.rho(1.0);
  CHECK(r(0) == doctest::Approx(1 + h * 2));
  CHECK(r(2) == doctest::Approx(1 + h * 8));
  const Eigen::MatrixXd Z3 = three.resolvent(1.0);
  CHECK(Z3(0, 1) == doctest::Approx(h / (r(0) * r(1))).epsilon(1e-14));
  CHECK(Z3(0, 2) == doctest::Approx(h * h / (r(0) * r(1) * r(2))).epsilon(1e-14));
}

TEST_CASE("resolvent inverts I - hM") {
  std::mt19937_64 gen(17);
  std::uniform_real_distribution<double> tdist(0.0, 20.0);
  for (int n = 2; n <= 5; ++n) {
    std::vector<double> lam;
    for (int i = 0; i < n; ++i) lam.push_back(1.0 + 0.7 * i);
    const double h = 1e-3;
    const DtSystem sys(spec_of(lam), h, SynthesisOptions::forced());
    for (int trial = 0; trial < 100; ++trial) {
      const double t = tdist(gen);
      const Eigen::MatrixXd A = dense_I_minus_hM(lam, 1.0 + t, h);
      const Eigen::MatrixXd P = A * sys.resolvent(t);
      CHECK((P - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-12);
      CHECK(A.isApprox(Eigen::MatrixXd::Identity(n, n) - h * sys.sigma_system().M_at(t), 1e-14));
    }
  }
}

TEST_CASE("sigma step") {
  const DtSystem one(unit(1), 1.0, SynthesisOptions::forced());
  const Eigen::VectorXd z = one.sigma_step(Eigen::VectorXd::Constant(1, 3.0), 0, Eigen::VectorXd::Zero(1));
  CHECK(z(0) == doctest::Approx(1.0).epsilon(1e-15));

  const double h = 0.001;
  const DtSystem three(unit(3), h, SynthesisOptions::forced());
  const Eigen::Vector3d zeta0(1, 1, 1);
  CHECK(three.sigma_step(Eigen::Vector3d::Zero(), 4, Eigen::Vector3d::Zero()).norm() == 0.0);
  const Eigen::VectorXd z1 = three.sigma_step(zeta0, 0, Eigen::Vector3d::Zero());
  const Eigen::VectorXd oracle = dense_I_minus_hM({1, 1, 1}, 1.0 + h, h).lu().solve(Eigen::VectorXd(zeta0));
  CHECK((z1 - oracle).cwiseAbs().maxCoeff() < 1e-12);

  const Eigen::Vector3d d(0.3, -0.2, 0.5);
  const Eigen::VectorXd z2 = three.sigma_step(zeta0, 7, d);
  const double t8 = 8 * h;
  const Eigen::VectorXd rhs = zeta0 + h * three.L_at(t8) * d;
  const Eigen::VectorXd oracle2 = dense_I_minus_hM({1, 1, 1}, 1.0 + t8, h).lu().solve(rhs);
  CHECK((z2 - oracle2).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("state step maps through S at the next grid time") {
  const double h = 0.01;
  const DtSystem sys(unit(3), h, SynthesisOptions::forced());
  CHECK(sys.state_step(Eigen::Vector3d::Zero(), 0, Eigen::Vector3d::Zero()).norm() == 0.0);
  const Eigen::Vector3d xi0(1, 1, 1), d(0.1, 0.2, -0.3);
  for (long long k : {0LL, 5LL, 120LL}) {
    const Eigen::MatrixXd S = sys.S_at(sys.time(k + 1));
    const Eigen::VectorXd expect = S.inverse() * sys.sigma_step(S * xi0, k, d);
    const Eigen::VectorXd got = sys.state_step(xi0, k, d);
    CHECK((got - expect).cwiseAbs().maxCoeff() < 1e-12 * std::max(1.0, expect.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("dt construction rejects bad parameters") {
  ControllerSpec s = spec_of({1, 2, 4});
  s.m = 4;
  CHECK_THROWS_AS(DtSystem(s, 1e-3), std::invalid_argument);
  CHECK_THROWS_AS(DtSystem(spec_of({1, 2}), 0.0), std::invalid_argument);
  CHECK_THROWS_AS(DtSystem(spec_of({1, 2}), -1e-3), std::invalid_argument);
}

TEST_CASE("simulate_dt records every step") {
  const DtSystem sys(spec_of({1, 2}), 0.01);
  const Trajectory tr = simulate_dt(sys, DisturbanceSpec::zero(2), Eigen::Vector2d(1, 1), 1.0);
  REQUIRE(tr.size() == 101);
  CHECK(tr.times[100] == doctest::Approx(1.0));
  CHECK(tr.meta.mode == "dt");
  CHECK(tr.meta.steps == 100);
  for (std::size_t k = 0; k < tr.size(); ++k) {
    const Eigen::VectorXd s = sys.S_at(tr.times[k]) * tr.states[k];
    CHECK((s - tr.sigmas[k]).norm() <= 1e-12 * std::max(1.0, s.norm()));
  }
  const Trajectory zero = simulate_dt(sys, DisturbanceSpec::zero(2), Eigen::Vector2d::Zero(), 1.0);
  for (std::size_t k = 0; k < zero.size(); ++k) CHECK(zero.states[k].norm() == 0.0);
}

TEST_CASE("nilpotent limit matrix") {
  const Eigen::MatrixXd N4 = nilpotent_limit(4, 0.01);
  CHECK(N4(3, 0) == doctest::Approx(-1.0 / 1e-6));
  CHECK(N4(1, 0) == doctest::Approx(-1.0 / 0.01));
  CHECK(N4(2, 0) == doctest::Approx(-1.0 / 1e-4));
  CHECK(N4(0, 0) == 0.0);
  CHECK(N4(0, 3) == 0.0);
  const Eigen::MatrixXd N3 = nilpotent_limit(3, 1e-3);
  CHECK(N3(1, 0) == doctest::Approx(-1e3));
  CHECK(N3(2, 1) == doctest::Approx(-1e3));
  CHECK(N3(2, 0) == doctest::Approx(-1e6));
  CHECK(nilpotent_limit(1, 0.1).norm() == 0.0);
  CHECK(limit_deviation(N3, N3) == 0.0);
}

TEST_CASE("limit products approach the nilpotent matrix as 1/(1 + h psi)") {
  for (int n : {3, 4})
    for (double h : {1e-3, 1e-2}) {
      const DtSystem sys(unit(n), h, SynthesisOptions::forced());
      for (double t : {1e4, 1e6, 1e8}) {
        const LimitReport r = limit_matrices(sys, t);
        const double expected = 1.0 / (1.0 + h * (1.0 + t));
        CHECK(r.dev_SZS == doctest::Approx(expected).epsilon(1e-3));
        CHECK(r.dev_SZL == doctest::Approx(expected).epsilon(1e-3));
      }
    }
}

TEST_CASE("scalar discrete demo") {
  const ScalarDtResult free = scalar_dt_demo(1.0, std::vector<double>(3, 0.0), 3);
  CHECK(free.x[3] == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
  CHECK(free.bound[3] == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
  CHECK(free.max_violation <= 1e-15);
  const ScalarDtResult zero = scalar_dt_demo(0.0, std::vector<double>(5, 0.0), 5);
  for (double x : zero.x) CHECK(x == 0.0);
  std::vector<double> d;
  for (int k = 0; k < 20; ++k) d.push_back(k % 2 == 0 ? 0.5 : -0.5);
  const ScalarDtResult alt = scalar_dt_demo(1.0, d, 20);
  CHECK(alt.max_violation <= 0.0);
  CHECK_THROWS_AS(scalar_dt_demo(1.0, d, 0), std::invalid_argument);
}

TEST_CASE("disturbance-free contraction ratio decreases toward zero") {
  for (int n : {2, 3}) {
    const DtSystem sys(unit(n), 1e-3, SynthesisOptions::forced());
    const std::vector<double> r = dt_contraction_ratios(sys, Eigen::VectorXd::Ones(n), 10000);
    REQUIRE(r.size() == 10000);
    // After the initial transient the ratio is monotone and tends to 1 / (1 + h psi).
    for (std::size_t k = 2000; k < r.size(); ++k) CHECK(r[k] <= r[k - 1] + 1e-15);
    CHECK(r.back() == doctest::Approx(1.0 / (1.0 + 1e-3 * (1.0 + 10.0))).epsilon(1e-3));
  }
}

TEST_CASE("bounded disturbance keeps the discrete loop bounded") {
  ExperimentConfig cfg = canonical_dt_config(42);
  cfg.t_final = 10.0;
  const Trajectory tr = simulate(cfg, true);
  const BoundednessReport b = boundedness(tr);
  CHECK(b.finite);
  CHECK(b.stabilized(0.0));
}
