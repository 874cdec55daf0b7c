#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "chirf/ensembles.hpp"
#include "chirf/mc.hpp"

using namespace chirf;
using namespace chirf::ensembles;

namespace {
const HessianModel2D kBerry{0.5, 0.5};
}

TEST_CASE("wishart mean and rank structure") {
  RngStream r(101, 0);
  Welford d0, d1, off, tr;
  for (int i = 0; i < 100000; ++i) {
    SymMatrix a = sample_wishart(3, 2, r);
    d0.add(a(0, 0));
    d1.add(a(1, 1));
    off.add(a(0, 1));
    tr.add(a.trace());
  }
  auto e0 = d0.estimate(0), e1 = d1.estimate(0), eo = off.estimate(0),
       et = tr.estimate(0);
  CHECK(std::abs(e0.value - 3.0) < 3.0 * e0.std_error);
  CHECK(std::abs(e1.value - 3.0) < 3.0 * e1.std_error);
  CHECK(std::abs(eo.value) < 3.0 * eo.std_error);
  CHECK(std::abs(et.value - 6.0) < 3.0 * et.std_error);
}

TEST_CASE("k = 0 wishart is the zero matrix, k = 1 is rank one") {
  RngStream r(102, 0);
  SymMatrix z = sample_wishart(0, 3, r);
  CHECK(z.max_abs() == 0.0);
  for (int i = 0; i < 100; ++i) {
    SymMatrix a = sample_wishart(1, 2, r);
    CHECK(std::abs(sym_det(a)) <= 1e-12 * a.max_abs() * a.max_abs());
    CHECK(a(0, 0) >= 0.0);
    CHECK(a(1, 1) >= 0.0);
  }
}

TEST_CASE("A(2,2) is a.s. nonsingular positive definite") {
  RngStream r(103, 0);
  for (int i = 0; i < 10000; ++i) {
    SymMatrix a = sample_wishart(2, 2, r);
    CHECK(sym_det(a) > 0.0);
  }
}

// The density of A(2,2), exp(-tr/2) / (4 pi sqrt(det)) over the PD cone,
// factorizes in the variables (a11, a22, s = a12/sqrt(a11 a22)) into
// Exp(2) x Exp(2) x arcsine; the histogram chi^2 test below uses those
// exact cell probabilities.
TEST_CASE("A(2,2) entries match the closed-form density") {
  const double x_edges[6] = {0.0, 0.5, 1.0, 2.0, 4.0, 1e300};
  const double s_edges[5] = {-1.0, -0.5, 0.0, 0.5, 1.0};
  auto exp_cell = [&](int i) {
    return std::exp(-0.5 * x_edges[i]) -
           (x_edges[i + 1] > 1e299 ? 0.0 : std::exp(-0.5 * x_edges[i + 1]));
  };
  auto arcsine_cell = [&](int i) {
    return (std::asin(s_edges[i + 1]) - std::asin(s_edges[i])) / kPi;
  };
  const int n = 200000;
  int counts[5][5][4] = {};
  RngStream r(104, 0);
  for (int it = 0; it < n; ++it) {
    SymMatrix a = sample_wishart(2, 2, r);
    double s = a(0, 1) / std::sqrt(a(0, 0) * a(1, 1));
    int bx = 0, by = 0, bs = 0;
    while (a(0, 0) >= x_edges[bx + 1]) ++bx;
    while (a(1, 1) >= x_edges[by + 1]) ++by;
    while (bs < 3 && s >= s_edges[bs + 1]) ++bs;
    ++counts[bx][by][bs];
  }
  double chi2 = 0.0;
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j)
      for (int q = 0; q < 4; ++q) {
        double expected = n * exp_cell(i) * exp_cell(j) * arcsine_cell(q);
        double diff = counts[i][j][q] - expected;
        chi2 += diff * diff / expected;
      }
  // 99 dof, far tail at 0.999 is ~148
  CHECK(chi2 < 149.0);
}

TEST_CASE("hessian-like draws: coupling moments") {
  RngStream r(105, 0);
  Welford h1g, h3g, h2g, gg, v1, v2, c13;
  for (int i = 0; i < 1000000; ++i) {
    HessianDraw d = sample_hessian_like_2d(kBerry, r);
    double h1 = d.h(0, 0), h2 = d.h(0, 1), h3 = d.h(1, 1);
    h1g.add(h1 * d.gamma);
    h3g.add(h3 * d.gamma);
    h2g.add(h2 * d.gamma);
    gg.add(d.gamma * d.gamma);
    v1.add(h1 * h1);
    v2.add(h2 * h2);
    c13.add(h1 * h3);
  }
  auto chk = [](Welford& w, double target) {
    auto e = w.estimate(0);
    CHECK(std::abs(e.value - target) < 3.0 * e.std_error);
  };
  chk(h1g, -1.0);
  chk(h3g, -1.0);
  chk(h2g, 0.0);
  chk(gg, 1.0);
  chk(v1, 2.0 * kBerry.sigma2 + kBerry.c);
  chk(v2, kBerry.sigma2);
  chk(c13, kBerry.c);
}

TEST_CASE("berry branch is exactly deterministic") {
  RngStream r(106, 0);
  for (int i = 0; i < 1000; ++i) {
    HessianDraw d = sample_hessian_like_2d(kBerry, r);
    CHECK(d.gamma == -(d.h(0, 0) + d.h(1, 1)) * 0.5);
  }
}

TEST_CASE("gamma variance for a noisy model") {
  HessianModel2D bf{2.0 / 3.0, 2.0 / 3.0};
  RngStream r(107, 0);
  Welford gg, h1g;
  for (int i = 0; i < 400000; ++i) {
    HessianDraw d = sample_hessian_like_2d(bf, r);
    gg.add(d.gamma * d.gamma);
    h1g.add(d.h(0, 0) * d.gamma);
  }
  auto eg = gg.estimate(0);
  CHECK(std::abs(eg.value - 1.0) < 3.0 * eg.std_error);
  auto eh = h1g.estimate(0);
  CHECK(std::abs(eh.value + 1.0) < 3.0 * eh.std_error);
}

TEST_CASE("models below the hessian-like threshold are rejected") {
  RngStream r(112, 0);
  CHECK_THROWS_AS(sample_hessian_like_2d(HessianModel2D{0.3, 0.3}, r),
                  std::invalid_argument);
}

TEST_CASE("bordered matrix layout and block determinant") {
  RngStream r(108, 0);
  HessianDraw d = sample_hessian_like_2d(kBerry, r);
  SymMatrix ht = assemble_tilde_h(d, 2, r);
  REQUIRE(ht.dim() == 3);
  CHECK(ht(0, 0) == d.h(0, 0));
  CHECK(ht(0, 1) == d.h(0, 1));
  CHECK(ht(1, 1) == d.h(1, 1));
  CHECK(ht(2, 2) == -d.gamma);

  const double zeros[2] = {0.0, 0.0};
  SymMatrix hz = assemble_tilde_h(d, 2, std::span<const double>(zeros, 2));
  CHECK(sym_det(hz) ==
        doctest::Approx(-d.gamma * sym_det(d.h)).epsilon(1e-13));

  // k = 4: border is 2 x 3, diagonal block carries -gamma
  SymMatrix h4 = assemble_tilde_h(d, 4, r);
  REQUIRE(h4.dim() == 5);
  for (int j = 2; j < 5; ++j) CHECK(h4(j, j) == -d.gamma);
  CHECK_THROWS_AS(assemble_tilde_h(d, 1, r), std::invalid_argument);
}

TEST_CASE("joint law object reproduces the catalog moments") {
  auto law = GaussianHessianLaw::from_model(kBerry);
  RngStream r(109, 0);
  Welford v1, c13, v2, h1g, gg;
  for (int i = 0; i < 400000; ++i) {
    HessianDraw d = law.sample(r);
    double h1 = d.h(0, 0), h2 = d.h(0, 1), h3 = d.h(1, 1);
    v1.add(h1 * h1);
    c13.add(h1 * h3);
    v2.add(h2 * h2);
    h1g.add(h1 * d.gamma);
    gg.add(d.gamma * d.gamma);
  }
  auto chk = [](Welford& w, double target) {
    auto e = w.estimate(0);
    CHECK(std::abs(e.value - target) < 3.0 * e.std_error);
  };
  chk(v1, 1.5);
  chk(c13, 0.5);
  chk(v2, 0.5);
  chk(h1g, -1.0);
  chk(gg, 1.0);
}

TEST_CASE("conditional sampling given gamma") {
  auto law = GaussianHessianLaw::from_model(kBerry);
  RngStream r(110, 0);
  // Berry: conditioning on gamma pins h1 + h3 = -2 gamma exactly
  for (int i = 0; i < 200; ++i) {
    SymMatrix h = law.sample_given_gamma(2.0, r);
    CHECK(h(0, 0) + h(1, 1) == doctest::Approx(-4.0).epsilon(1e-12));
  }
  HessianModel2D bf{2.0 / 3.0, 2.0 / 3.0};
  auto law_bf = GaussianHessianLaw::from_model(bf);
  Welford m1;
  for (int i = 0; i < 200000; ++i) {
    SymMatrix h = law_bf.sample_given_gamma(2.0, r);
    m1.add(h(0, 0));
  }
  auto e = m1.estimate(0);
  CHECK(std::abs(e.value + 2.0) < 3.0 * e.std_error);
}

TEST_CASE("user-supplied joint covariance validates E[H gamma] = -I") {
  // non-catalog 2x2 law: sigma2 = 0.6, c = 0.7 (order h1, h2, h3, gamma)
  double diag = 2.0 * 0.6 + 0.7;
  std::vector<double> cov = {
      diag, 0.0, 0.7,  -1.0,  //
      0.0,  0.6, 0.0,  0.0,   //
      0.7,  0.0, diag, -1.0,  //
      -1.0, 0.0, -1.0, 1.0,
  };
  auto law = GaussianHessianLaw::from_covariance(cov, 2);
  RngStream r(111, 0);
  auto chk = validate_hessian_like(law, 300000, r);
  CHECK(chk.max_z <= 3.0);

  // badly scaled gamma variance is rejected up front
  cov[15] = 2.0;
  CHECK_THROWS_AS(GaussianHessianLaw::from_covariance(cov, 2),
                  std::invalid_argument);
}
