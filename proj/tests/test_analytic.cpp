#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "chirf/analytic.hpp"
#include "chirf/rng.hpp"

using namespace chirf;
using namespace chirf::analytic;

TEST_CASE("spectral moments of single multipoles") {
  {
    auto m = spectral_moments(PowerSpectrum::single_l(1, 4.0 * kPi / 3.0));
    CHECK(m.k0 == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(m.k2 == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(m.k4 == doctest::Approx(1.0).epsilon(1e-14));
  }
  {
    auto m = spectral_moments(PowerSpectrum::single_l(2, 4.0 * kPi / 5.0));
    CHECK(m.k0 == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(m.k2 == doctest::Approx(-3.0).epsilon(1e-14));
    CHECK(m.k4 == doctest::Approx(12.0).epsilon(1e-14));
  }
}

TEST_CASE("power spectrum invariants") {
  CHECK_THROWS_AS(PowerSpectrum({{0, 1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(PowerSpectrum({{2, -1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(PowerSpectrum({{1, 0.0}, {3, 0.0}}), std::invalid_argument);
  CHECK_THROWS_AS(PowerSpectrum({{2, 1.0}, {2, 1.0}}), std::invalid_argument);
  auto norm = PowerSpectrum({{0, 2.0}, {3, 5.0}}).normalized();
  CHECK(spectral_moments(norm).k0 == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("planar hessian model catalog") {
  auto berry = planar_hessian_model(1.5);
  CHECK(berry.sigma2 == doctest::Approx(0.5));
  CHECK(berry.c == doctest::Approx(0.5));
  CHECK(berry.hessian_like());
  CHECK(berry.gamma_trace_coeff() == doctest::Approx(0.5));
  CHECK(berry.gamma_noise_coeff() == doctest::Approx(0.0));

  auto k4_2 = planar_hessian_model(2.0);
  CHECK(k4_2.sigma2 == doctest::Approx(2.0 / 3.0));
  CHECK(k4_2.c == doctest::Approx(2.0 / 3.0));
  CHECK(k4_2.gamma_trace_coeff() == doctest::Approx(3.0 / 8.0));
  CHECK(k4_2.gamma_noise_coeff() == doctest::Approx(0.5));

  CHECK_FALSE(planar_hessian_model(1.0).hessian_like());
  CHECK_THROWS_AS(planar_hessian_model(0.0), std::invalid_argument);
}

TEST_CASE("spherical hessian model, corrected variant") {
  auto sm = spherical_hessian_model(PowerSpectrum::single_l(2, 1.0));
  CHECK(sm.r2 == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(sm.a2 == doctest::Approx(12.0).epsilon(1e-14));
  CHECK(sm.model.c == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  CHECK(sm.model.sigma2 == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(sm.model.c - sm.model.sigma2 ==
        doctest::Approx(1.0 / sm.r2).epsilon(1e-14));
  // single multipoles are exactly degenerate (deterministic gamma)
  CHECK(sm.model.sigma2 + sm.model.c == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("c - sigma^2 = 1/r^2 for random valid spectra") {
  RngStream r(31, 0);
  for (int i = 0; i < 20; ++i) {
    std::vector<std::pair<int, double>> entries;
    int nl = 2 + static_cast<int>(r.uniform() * 4);
    int l = 1;
    for (int j = 0; j < nl; ++j) {
      l += 1 + static_cast<int>(r.uniform() * 6);
      entries.push_back({l, 0.05 + r.uniform()});
    }
    auto sm = spherical_hessian_model(PowerSpectrum(entries));
    double lhs = sm.model.c - sm.model.sigma2;
    CHECK(lhs == doctest::Approx(1.0 / sm.r2).epsilon(1e-12));
  }
}

TEST_CASE("spherical hessian model, text variant") {
  auto sm = spherical_hessian_model(PowerSpectrum::single_l(2, 1.0),
                                    SignVariant::paper_text);
  CHECK(sm.model.c - sm.model.sigma2 == doctest::Approx(-1.0 / 9.0));
}

TEST_CASE("a1 density") {
  HessianModel2D flat{0.4, 0.4};
  CHECK(ec_density_a1(0.0, flat) ==
        doctest::Approx(-gaussian_density(0.0)).epsilon(1e-14));
  CHECK(ec_density_a1(3.0, flat) ==
        doctest::Approx(8.0 * gaussian_density(3.0)).epsilon(1e-14));
  // dominant Hermite growth at large t
  HessianModel2D m{0.3, 0.9};
  CHECK(ec_density_a1(6.0, m) / (hermite(2, 6.0) * gaussian_density(6.0)) ==
        doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("sphere maxima density") {
  CHECK(maxima_density_sphere(1.0, 0.0) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(maxima_density_sphere(1.0, 3.0) ==
        doctest::Approx(18.0 * kSqrtTwoPi * gaussian_density(3.0))
            .epsilon(1e-14));
  CHECK(maxima_density_sphere(1.0, 3.0) == doctest::Approx(0.19996).epsilon(1e-3));
  CHECK(maxima_density_sphere(1.0, 3.0, SignVariant::paper_text) ==
        doctest::Approx(14.0 * kSqrtTwoPi * gaussian_density(3.0))
            .epsilon(1e-14));
  CHECK_THROWS_AS(maxima_density_sphere(0.0, 1.0), std::invalid_argument);
}

TEST_CASE("LK curvatures of rS^2 x S^1") {
  auto lk = lk_sphere_circle(1.0);
  REQUIRE(lk.curvatures.size() == 4);
  CHECK(lk.curvatures[0] == doctest::Approx(0.0));
  CHECK(lk.curvatures[1] == doctest::Approx(4.0 * kPi).epsilon(1e-14));
  CHECK(lk.curvatures[2] == doctest::Approx(0.0));
  CHECK(lk.curvatures[3] == doctest::Approx(8.0 * kPi * kPi).epsilon(1e-14));
  // top curvature is the product volume, so it scales as r^2
  auto lk3 = lk_sphere_circle(3.0);
  CHECK(lk3.curvatures[3] == doctest::Approx(9.0 * lk.curvatures[3]));
  CHECK(lk3.curvatures[1] == doctest::Approx(lk.curvatures[1]));
}

TEST_CASE("curvature sum") {
  ProductLK zero{{0.0, 0.0, 0.0, 0.0}, 1.0};
  CHECK(ec_sum_product(zero, 2.0) == 0.0);
  ProductLK tail_only{{1.0}, 1.0};
  CHECK(ec_sum_product(tail_only, 1.3) ==
        doctest::Approx(gaussian_upper_tail(1.3)).epsilon(1e-14));
  CHECK(ec_sum_product(lk_sphere_circle(1.0), 3.0) ==
        doctest::Approx(18.0 * kSqrtTwoPi * gaussian_density(3.0))
            .epsilon(1e-13));
}

TEST_CASE("maxima density equals the curvature sum for every t") {
  for (double r : {0.5, 1.0, std::sqrt(21.0)})
    for (double t = -2.0; t <= 6.0; t += 0.37) {
      double a = maxima_density_sphere(r, t);
      double b = ec_sum_product(lk_sphere_circle(r), t);
      CHECK(a == doctest::Approx(b).epsilon(1e-12));
    }
  // with a nonzero L_0 the two differ by exactly the tail term
  auto lk = lk_sphere_circle(2.0);
  lk.curvatures[0] = 5.0;
  double t = 1.1;
  CHECK(ec_sum_product(lk, t) - maxima_density_sphere(2.0, t) ==
        doctest::Approx(5.0 * gaussian_upper_tail(t)).epsilon(1e-12));
}

TEST_CASE("expected nodal volume") {
  // k = m: vol_0(S^0)/vol_m(S^m) * vol(M)
  CHECK(expected_nodal_volume(2, 2, 4.0 * kPi) ==
        doctest::Approx(2.0).epsilon(1e-14));
  CHECK(expected_nodal_volume(1, 2, 4.0 * kPi) ==
        doctest::Approx(kTwoPi / (4.0 * kPi) * 4.0 * kPi).epsilon(1e-13));
  CHECK_THROWS_AS(expected_nodal_volume(3, 2, 1.0), std::invalid_argument);
}
