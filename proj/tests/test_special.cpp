#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "chirf/rng.hpp"
#include "chirf/special.hpp"
#include "support/oracles.hpp"

using namespace chirf;

TEST_CASE("hermite values and recurrence") {
  CHECK(hermite(0, 7.3) == 1.0);
  CHECK(hermite(2, 0.0) == -1.0);
  CHECK(hermite(3, 2.0) == 2.0);  // 8 - 6
  // H6(x) = x^6 - 15x^4 + 45x^2 - 15
  double x = 1.37;
  double h6 = std::pow(x, 6) - 15 * std::pow(x, 4) + 45 * x * x - 15;
  CHECK(hermite(6, x) == doctest::Approx(h6).epsilon(1e-14));
  CHECK_THROWS_AS(hermite(-1, 0.0), std::invalid_argument);
}

TEST_CASE("hermite tail identity against quadrature") {
  for (int n = 0; n <= 6; ++n)
    for (double t : {-3.0, -1.0, 0.0, 0.7, 2.0, 4.5}) {
      double lhs = oracles::integrate(
          [n](double x) { return hermite(n + 1, x) * gaussian_density(x); }, t,
          t + 46.0);
      CHECK(std::abs(lhs - hermite_weighted(n, t)) < 1e-8);
    }
}

TEST_CASE("tail ratio: exact at 0, Mills asymptotics, quadrature at 1") {
  CHECK(hermite_tail_ratio(0.0) ==
        doctest::Approx(0.5 * kSqrtTwoPi).epsilon(1e-14));
  CHECK(hermite_tail_ratio(10.0) * 10.0 == doctest::Approx(1.0).epsilon(0.02));
  double psi1 = oracles::integrate(
      [](double x) { return gaussian_density(x); }, 1.0, 44.0);
  CHECK(hermite_tail_ratio(1.0) ==
        doctest::Approx(psi1 / gaussian_density(1.0)).epsilon(1e-10));
  // decreasing and positive
  double prev = hermite_tail_ratio(-5.0);
  for (double t = -4.5; t < 6.0; t += 0.5) {
    double v = hermite_tail_ratio(t);
    CHECK(v > 0.0);
    CHECK(v < prev);
    prev = v;
  }
  // weighted form at n = -1 is the plain upper tail
  CHECK(hermite_weighted(-1, 1.3) ==
        doctest::Approx(gaussian_upper_tail(1.3)).epsilon(1e-15));
}

TEST_CASE("chi moments") {
  CHECK(chi_moment(4, -2.0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(chi_moment(7, 0.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(chi_moment(2, 2.0) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(chi_moment(300, -2.0) == doctest::Approx(1.0 / 298.0).epsilon(1e-12));
  CHECK_THROWS_AS(chi_moment(2, -2.0), std::domain_error);
  CHECK_THROWS_AS(chi_moment(1, -1.5), std::domain_error);
}

TEST_CASE("chi moment Cauchy-Schwarz product") {
  RngStream r(17, 0);
  for (int i = 0; i < 50; ++i) {
    int k = 1 + static_cast<int>(r.uniform() * 30);
    double a = r.uniform() * (k - 0.01);
    CHECK(chi_moment(k, a) * chi_moment(k, -a) >= 1.0 - 1e-12);
  }
}

TEST_CASE("inverse chi constant") {
  CHECK(inv_chi_constant(4, 2) == doctest::Approx(0.5).epsilon(1e-14));
  // Gamma(1/2) / (2 Gamma(3/2)) = 1
  CHECK(inv_chi_constant(3, 2) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK_THROWS_AS(inv_chi_constant(2, 2), std::domain_error);
}

TEST_CASE("normal quantile inverts the tail") {
  for (double p : {1e-300, 1e-100, 1e-12, 0.01, 0.3, 0.5, 0.9, 0.999}) {
    double q = normal_quantile(p);
    double back = 1.0 - gaussian_upper_tail(q);
    if (p < 1e-280) {
      // erfc underflows before the quantile does; just check the magnitude
      CHECK(q < -36.0);
    } else {
      CHECK(back == doctest::Approx(p).epsilon(1e-12));
    }
  }
  CHECK_THROWS_AS(normal_quantile(0.0), std::domain_error);
}

TEST_CASE("chi cdf against quadrature") {
  double direct = oracles::integrate(
      [](double x) {
        // chi_3 density
        return std::sqrt(2.0 / kPi) * x * x * std::exp(-0.5 * x * x);
      },
      0.0, 1.7);
  CHECK(chi_cdf(3, 1.7) == doctest::Approx(direct).epsilon(1e-10));
  CHECK(chi_cdf(5, 0.0) == 0.0);
  CHECK(chi_cdf(5, 40.0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("sphere surface volumes") {
  CHECK(sphere_surface_volume(0) == doctest::Approx(2.0));
  CHECK(sphere_surface_volume(1) == doctest::Approx(kTwoPi));
  CHECK(sphere_surface_volume(2) == doctest::Approx(4.0 * kPi));
  CHECK(sphere_surface_volume(3) == doctest::Approx(2.0 * kPi * kPi));
}

TEST_CASE("legendre polynomials") {
  CHECK(legendre_p(2, 0.5) == doctest::Approx(-0.125).epsilon(1e-14));
  CHECK(legendre_p(6, 1.0) == doctest::Approx(1.0).epsilon(1e-13));
  double h = 1e-6;
  for (int l : {1, 3, 6}) {
    double fd = (legendre_p(l, 0.4 + h) - legendre_p(l, 0.4 - h)) / (2 * h);
    CHECK(legendre_p_derivative(l, 0.4) == doctest::Approx(fd).epsilon(1e-6));
  }
}
