#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "hyperstab/gain_schedule.hpp"

using namespace hyperstab;

TEST_CASE("affine gain values") {
  const GainSchedule g = GainSchedule::affine();
  CHECK(psi_value(g, 0.0) == 1.0);
  CHECK(psi_value(g, 4.0) == 5.0);
  CHECK(psi_derivative(g, 7.0) == 1.0);
  CHECK(g.closure().c0 == 1.0);
  CHECK(g.closure().c1 == 0.0);
}

TEST_CASE("saturated affine gain") {
  const GainSchedule g = GainSchedule::affine().with_cap(3.0);
  CHECK(psi_value(g, 10.0) == 3.0);
  CHECK(psi_derivative(g, 10.0) == 0.0);
  CHECK(g.saturated(10.0));
  CHECK_FALSE(g.saturated(1.0));
  CHECK(psi_value(g, 1.0) == 2.0);
  CHECK(g.without_cap().value(10.0) == 11.0);
  for (double t = 0.0; t < 100.0; t += 0.37) CHECK(psi_value(g, t) <= 3.0);
}

TEST_CASE("exponential gain") {
  const GainSchedule g = GainSchedule::exponential(2.0, 0.5);
  CHECK(psi_value(g, 0.0) == 2.0);
  CHECK(psi_derivative(GainSchedule::exponential(1.0, 2.0), 0.0) == 2.0);
  CHECK(g.closure().c0 == 0.0);
  CHECK(g.closure().c1 == 0.5);
  CHECK_THROWS_AS(GainSchedule::exponential(0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(GainSchedule::exponential(1.0, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(GainSchedule::affine().with_cap(0.0), std::invalid_argument);
}

TEST_CASE("monotone and closure exact on random times") {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(0.0, 20.0);
  const GainSchedule gs[] = {GainSchedule::affine(), GainSchedule::exponential(1.5, 0.2),
                             GainSchedule::exponential(0.5, 0.1)};
  for (const auto& g : gs) {
    for (int i = 0; i < 100; ++i) {
      const double t = u(gen);
      const double d = 1e-6;
      const double fd = (g.value(t + d) - g.value(t - d)) / (2 * d);
      // Truncation is ~psi''' d^2, rounding ~ eps psi / d; scale by psi for the exponential case.
      CHECK(std::abs(fd - g.derivative(t)) <= 10 * d * std::max(1.0, g.value(t)));
      const double t2 = t + u(gen) * 0.1 + 1e-3;
      CHECK(g.value(t2) > g.value(t));
    }
  }
}
