#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "chirf/fieldsim.hpp"
#include "chirf/mc.hpp"
#include "chirf/special.hpp"
#include "support/oracles.hpp"

using namespace chirf;
using namespace chirf::fieldsim;
using analytic::PowerSpectrum;

namespace {

Vec3 random_point(RngStream& r) {
  return normalized({r.normal(), r.normal(), r.normal()});
}

SphericalFieldSample unit_coeff_sample(int l, int m) {
  RngStream r(1, 1);
  SphericalFieldSample s = synth_sphere(PowerSpectrum::single_l(l, 1.0), r);
  for (int mm = -l; mm <= l; ++mm) s.coeff_ref(l, mm) = (mm == m) ? 1.0 : 0.0;
  return s;
}

}  // namespace

TEST_CASE("harmonic addition theorem at random points") {
  RngStream r(301, 0);
  for (int l : {1, 2, 5, 9}) {
    for (int trial = 0; trial < 5; ++trial) {
      Vec3 p = random_point(r);
      double sum = 0.0;
      for (int m = -l; m <= l; ++m) {
        double y = unit_coeff_sample(l, m).value(p);
        sum += y * y;
      }
      CHECK(sum == doctest::Approx((2 * l + 1) / (4.0 * kPi)).epsilon(1e-11));
    }
  }
}

TEST_CASE("single-l covariance matches the Legendre kernel") {
  // cov(X(p), X(q)) at angle pi/3 for normalized l=2: P_2(1/2) = -1/8
  RngStream r(302, 0);
  const PowerSpectrum spec = PowerSpectrum::single_l(2, 1.0);
  Vec3 p = {1, 0, 0};
  double ang = kPi / 3.0;
  Vec3 q = {std::cos(ang), std::sin(ang), 0};
  Welford cov, var;
  for (int i = 0; i < 20000; ++i) {
    RngStream ri = r;
    ri.seek_block(static_cast<std::uint64_t>(i) * kBatchBlockStride);
    SphericalFieldSample s = synth_sphere(spec, ri);
    cov.add(s.value(p) * s.value(q));
    var.add(s.value(p) * s.value(p));
  }
  auto ec = cov.estimate(0);
  CHECK(std::abs(ec.value - legendre_p(2, 0.5)) < 3.0 * ec.std_error);
  auto ev = var.estimate(0);
  CHECK(std::abs(ev.value - 1.0) < 3.0 * ev.std_error);
}

TEST_CASE("covariance depends only on the angle") {
  RngStream r(303, 0);
  const PowerSpectrum spec({{1, 0.4}, {3, 1.0}, {4, 0.2}});
  double ang = 0.9;
  Vec3 p1 = {1, 0, 0}, q1 = {std::cos(ang), std::sin(ang), 0};
  Vec3 p2 = normalized({0.3, -0.5, 0.8});
  TangentFrame fr = tangent_frame(p2);
  Vec3 q2 = geodesic_step(p2, normalized(0.7 * fr.e1 + 0.2 * fr.e2), ang);
  Welford c1, c2;
  for (int i = 0; i < 30000; ++i) {
    RngStream ri = r;
    ri.seek_block(static_cast<std::uint64_t>(i) * kBatchBlockStride);
    SphericalFieldSample s = synth_sphere(spec, ri);
    c1.add(s.value(p1) * s.value(q1));
    c2.add(s.value(p2) * s.value(q2));
  }
  auto e1 = c1.estimate(0), e2 = c2.estimate(0);
  CHECK(std::abs(e1.value - e2.value) <
        3.0 * std::hypot(e1.std_error, e2.std_error));
}

TEST_CASE("gradient energy matches 2 r^2") {
  RngStream r(304, 0);
  const PowerSpectrum spec = PowerSpectrum::single_l(6, 1.0);
  Vec3 p = normalized({0.2, 0.3, 0.9});
  Welford w;
  for (int i = 0; i < 20000; ++i) {
    RngStream ri = r;
    ri.seek_block(static_cast<std::uint64_t>(i) * kBatchBlockStride);
    SphericalFieldSample s = synth_sphere(spec, ri);
    Jet2 j = s.eval(p, 1);
    w.add(j.grad[0] * j.grad[0] + j.grad[1] * j.grad[1]);
  }
  auto e = w.estimate(0);
  CHECK(std::abs(e.value - 42.0) < 3.0 * e.std_error);  // 2 r^2 = lambda_6
}

TEST_CASE("l = 0 component contributes no gradient") {
  RngStream r(305, 0);
  SphericalFieldSample s = synth_sphere(PowerSpectrum({{0, 1.0}, {2, 1.0}}), r,
                                        /*normalize=*/false);
  for (int m = -2; m <= 2; ++m) s.coeff_ref(2, m) = 0.0;
  Vec3 p = random_point(r);
  Jet2 j = s.eval(p, 2);
  CHECK(j.grad[0] == 0.0);
  CHECK(j.grad[1] == 0.0);
  CHECK(j.hess.max_abs() == 0.0);
  CHECK(j.value == doctest::Approx(s.coeff(0, 0) / std::sqrt(4.0 * kPi)));
}

TEST_CASE("analytic jets agree with finite differences") {
  RngStream r(306, 0);
  const PowerSpectrum spec({{2, 1.0}, {5, 0.6}, {8, 0.15}});
  SphericalFieldSample s = synth_sphere(spec, r);
  double worst_grad = 0.0, worst = 0.0;
  for (int i = 0; i < 40; ++i) {
    Vec3 p = random_point(r);
    Jet2 ja = s.eval(p, 2);
    // plain centered gradient at step 1e-4
    Jet2 jg = fd_jet_sphere([&](const Vec3& q) { return s.value(q); }, p, 1e-4);
    worst_grad = std::max({worst_grad, std::abs(ja.grad[0] - jg.grad[0]),
                           std::abs(ja.grad[1] - jg.grad[1])});
    // extrapolated stencil for the full jet
    Jet2 jf = oracles::richardson_jet(
        [&](double h) {
          return fd_jet_sphere([&](const Vec3& q) { return s.value(q); }, p,
                               h);
        },
        1e-3);
    worst = std::max({worst, std::abs(ja.grad[0] - jf.grad[0]),
                      std::abs(ja.grad[1] - jf.grad[1]),
                      std::abs(ja.hess(0, 0) - jf.hess(0, 0)),
                      std::abs(ja.hess(0, 1) - jf.hess(0, 1)),
                      std::abs(ja.hess(1, 1) - jf.hess(1, 1))});
  }
  CHECK(worst_grad < 1e-6);
  CHECK(worst < 1e-6);
}

TEST_CASE("jets are exact at the poles too") {
  RngStream r(307, 0);
  const PowerSpectrum spec({{1, 0.5}, {3, 1.0}});
  SphericalFieldSample s = synth_sphere(spec, r);
  for (double zs : {1.0, -1.0}) {
    Vec3 pole = {0.0, 0.0, zs};
    Jet2 ja = s.eval(pole, 2);
    Jet2 jf = fd_jet_sphere([&](const Vec3& q) { return s.value(q); }, pole,
                            1e-4);
    CHECK(std::abs(ja.grad[0] - jf.grad[0]) < 1e-6);
    CHECK(std::abs(ja.grad[1] - jf.grad[1]) < 1e-6);
    CHECK(std::abs(ja.hess(0, 0) - jf.hess(0, 0)) < 1e-6);
    CHECK(std::abs(ja.hess(0, 1) - jf.hess(0, 1)) < 1e-6);
    CHECK(std::abs(ja.hess(1, 1) - jf.hess(1, 1)) < 1e-6);
  }
}

TEST_CASE("radius rescaling of jets") {
  RngStream r(308, 0);
  SphericalFieldSample s = synth_sphere(PowerSpectrum::single_l(3, 1.0), r);
  Vec3 p = random_point(r);
  Jet2 unit = s.eval(p, 2);
  Jet2 scaled = jet_on_radius_sphere(unit, 4.0);
  CHECK(scaled.value == unit.value);
  CHECK(scaled.grad[0] == doctest::Approx(unit.grad[0] / 2.0));
  CHECK(scaled.hess(0, 1) == doctest::Approx(unit.hess(0, 1) / 4.0));
}

TEST_CASE("berry covariance approaches the Bessel kernel") {
  RngStream r(309, 0);
  Welford cov, var;
  for (int i = 0; i < 10000; ++i) {
    RngStream ri = r;
    ri.seek_block(static_cast<std::uint64_t>(i) * kBatchBlockStride);
    PlanarFieldSample s = synth_planar(PlanarKind::berry, 4096, ri);
    double a = s.value(0.0, 0.0);
    double b = s.value(1.0, 0.0);
    cov.add(a * b);
    var.add(a * a);
  }
  auto ec = cov.estimate(0);
  double j0 = std::cyl_bessel_j(0.0, std::sqrt(2.0));
  CHECK(std::abs(ec.value - j0) < 3.0 * ec.std_error);
  auto ev = var.estimate(0);
  CHECK(std::abs(ev.value - 1.0) < 3.0 * ev.std_error);
}

TEST_CASE("berry realizations solve the Helmholtz identity") {
  RngStream r(310, 0);
  PlanarFieldSample s = synth_planar(PlanarKind::berry, 256, r);
  // 4th-order finite-difference Laplacian
  const double h = 0.01;
  auto lap = [&](double x, double y) {
    auto f = [&](double a, double b) { return s.value(a, b); };
    double c = -2.5 * (f(x, y) + f(x, y));
    double dx = (-f(x + 2 * h, y) + 16 * f(x + h, y) + 16 * f(x - h, y) -
                 f(x - 2 * h, y)) / 12.0;
    double dy = (-f(x, y + 2 * h) + 16 * f(x, y + h) + 16 * f(x, y - h) -
                 f(x, y - 2 * h)) / 12.0;
    return (dx + dy + c) / (h * h);
  };
  for (double x : {-0.7, 0.0, 1.3})
    for (double y : {-0.2, 0.8}) {
      CHECK(std::abs(lap(x, y) + 2.0 * s.value(x, y)) < 1e-8);
    }
}

TEST_CASE("bargmann-fock variance and covariance") {
  RngStream r(311, 0);
  Welford var0, cov1;
  for (int i = 0; i < 10000; ++i) {
    RngStream ri = r;
    ri.seek_block(static_cast<std::uint64_t>(i) * kBatchBlockStride);
    PlanarFieldSample s = synth_planar(PlanarKind::bargmann_fock, 0, ri, 2.0);
    double a = s.value(0.0, 0.0);
    double b = s.value(1.0, 0.0);
    var0.add(a * a);
    cov1.add(a * b);
  }
  auto ev = var0.estimate(0);
  CHECK(std::abs(ev.value - 1.0) < 3.0 * ev.std_error);
  auto ec = cov1.estimate(0);
  CHECK(std::abs(ec.value - std::exp(-0.5)) < 3.0 * ec.std_error);
}

TEST_CASE("planar jets agree with finite differences") {
  RngStream r(312, 0);
  PlanarFieldSample berry = synth_planar(PlanarKind::berry, 128, r);
  PlanarFieldSample bf = synth_planar(PlanarKind::bargmann_fock, 0, r, 2.0);
  for (const PlanarFieldSample* s : {&berry, &bf}) {
    double worst = 0.0;
    for (double x : {-1.0, 0.3})
      for (double y : {0.0, 0.9}) {
        Jet2 ja = s->eval(x, y, 2);
        Jet2 jf = fd_jet_planar(
            [&](double a, double b) { return s->value(a, b); }, x, y, 1e-4);
        worst = std::max({worst, std::abs(ja.grad[0] - jf.grad[0]),
                          std::abs(ja.grad[1] - jf.grad[1]),
                          std::abs(ja.hess(0, 0) - jf.hess(0, 0)),
                          std::abs(ja.hess(0, 1) - jf.hess(0, 1)),
                          std::abs(ja.hess(1, 1) - jf.hess(1, 1))});
      }
    CHECK(worst < 1e-6);
  }
}

TEST_CASE("chi field basics") {
  RngStream r(313, 0);
  const PowerSpectrum spec = PowerSpectrum::single_l(3, 1.0);
  std::vector<SphericalFieldSample> comps;
  comps.push_back(synth_sphere(spec, r));
  SphericalChiField f1 = assemble_chi(std::move(comps));
  Vec3 p = random_point(r);
  CHECK(f1.f(p) == doctest::Approx(std::abs(f1.components()[0].value(p)))
                       .epsilon(1e-14));

  std::vector<SphericalFieldSample> comps3;
  for (int i = 0; i < 3; ++i) comps3.push_back(synth_sphere(spec, r));
  SphericalChiField f3 = assemble_chi(std::move(comps3));
  for (int i = 0; i < 20; ++i) {
    Vec3 q = random_point(r);
    double s = 0.0;
    for (const auto& c : f3.components()) s += c.value(q) * c.value(q);
    CHECK(f3.f(q) * f3.f(q) == doctest::Approx(s).epsilon(1e-13));
  }
  // phi(p, u) = Y(p) . u
  double u[3] = {0.6, -0.64, 0.48};
  double direct = 0.0;
  for (int i = 0; i < 3; ++i) direct += u[i] * f3.components()[i].value(p);
  CHECK(f3.phi(std::span<const double>(u, 3), p) ==
        doctest::Approx(direct).epsilon(1e-14));
}

TEST_CASE("chi field jets satisfy the chain-rule identities") {
  RngStream r(314, 0);
  const PowerSpectrum spec({{2, 1.0}, {4, 0.5}});
  std::vector<SphericalFieldSample> comps;
  for (int i = 0; i < 2; ++i) comps.push_back(synth_sphere(spec, r));
  SphericalChiField f2 = assemble_chi(std::move(comps));
  double worst_g = 0.0, worst_h = 0.0;
  for (int i = 0; i < 25; ++i) {
    Vec3 p = random_point(r);
    Jet2 jF = f2.jet_F(2, p);
    Jet2 fd = oracles::richardson_jet(
        [&](double h) {
          return fd_jet_sphere([&](const Vec3& q) { return f2.F(q); }, p, h);
        },
        1e-3);
    worst_g = std::max({worst_g, std::abs(jF.grad[0] - fd.grad[0]),
                        std::abs(jF.grad[1] - fd.grad[1])});
    worst_h = std::max({worst_h, std::abs(jF.hess(0, 0) - fd.hess(0, 0)),
                        std::abs(jF.hess(0, 1) - fd.hess(0, 1)),
                        std::abs(jF.hess(1, 1) - fd.hess(1, 1))});
  }
  CHECK(worst_g < 1e-6);
  CHECK(worst_h < 1e-6);
}

TEST_CASE("one-point law of f_k is chi(k)") {
  RngStream r(315, 0);
  const PowerSpectrum spec = PowerSpectrum::single_l(4, 1.0);
  const int n = 10000;
  Vec3 p = {0.0, 1.0, 0.0};
  std::vector<double> values;
  values.reserve(n);
  for (int i = 0; i < n; ++i) {
    RngStream ri = r;
    ri.seek_block(static_cast<std::uint64_t>(i) * kBatchBlockStride);
    std::vector<SphericalFieldSample> comps;
    comps.push_back(synth_sphere(spec, ri));
    comps.push_back(synth_sphere(spec, ri));
    values.push_back(assemble_chi(std::move(comps)).f(p));
  }
  std::sort(values.begin(), values.end());
  double ks = 0.0;
  for (int i = 0; i < n; ++i) {
    double cdf = chi_cdf(2, values[i]);
    ks = std::max(ks, std::abs(cdf - (i + 1.0) / n));
    ks = std::max(ks, std::abs(cdf - static_cast<double>(i) / n));
  }
  CHECK(ks < 1.358 / std::sqrt(static_cast<double>(n)));  // 95% KS band
}

TEST_CASE("nodal-proximity refusal") {
  RngStream r(316, 0);
  SphericalFieldSample s = synth_sphere(PowerSpectrum::single_l(2, 1.0), r);
  for (int m = -2; m <= 2; ++m) s.coeff_ref(2, m) = 0.0;
  std::vector<SphericalFieldSample> comps{s};
  SphericalChiField f = assemble_chi(std::move(comps));
  Vec3 p = {1, 0, 0};
  CHECK_THROWS_AS(f.jet_f(1, p), std::domain_error);
  CHECK(f.F(p) == 0.0);  // value itself stays defined
}

TEST_CASE("mismatched components are rejected") {
  RngStream r(317, 0);
  std::vector<SphericalFieldSample> comps;
  comps.push_back(synth_sphere(PowerSpectrum::single_l(2, 1.0), r));
  comps.push_back(synth_sphere(PowerSpectrum::single_l(3, 1.0), r));
  CHECK_THROWS_AS(assemble_chi(std::move(comps)), std::invalid_argument);
}

TEST_CASE("synthesis is deterministic per stream") {
  RngStream a(318, 9), b(318, 9);
  auto s1 = synth_sphere(PowerSpectrum::single_l(5, 2.0), a);
  auto s2 = synth_sphere(PowerSpectrum::single_l(5, 2.0), b);
  for (int m = -5; m <= 5; ++m) CHECK(s1.coeff(5, m) == s2.coeff(5, m));
}
