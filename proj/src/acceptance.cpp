#include "chirf/acceptance.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>

#include "chirf/analytic.hpp"
#include "chirf/critcount.hpp"
#include "chirf/ensembles.hpp"
#include "chirf/fieldsim.hpp"
#include "chirf/io.hpp"
#include "chirf/kacrice.hpp"
#include "chirf/mc.hpp"
#include "chirf/special.hpp"
#include "chirf/sphere_grid.hpp"

namespace chirf::acceptance {

namespace {

using analytic::HessianModel2D;
using analytic::PowerSpectrum;
using analytic::SignVariant;
using critcount::OracleSource;

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

struct Check {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    if (!detail.empty()) detail += "; ";
    detail += what + (ok ? " ok" : " FAILED");
  }
  void note(const std::string& what) {
    if (!detail.empty()) detail += "; ";
    detail += what;
  }
};

double simpson(const std::function<double(double)>& f, double a, double b) {
  double m = 0.5 * (a + b);
  return (b - a) / 6.0 * (f(a) + 4.0 * f(m) + f(b));
}

double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double tol, int depth) {
  double m = 0.5 * (a + b);
  double whole = simpson(f, a, b);
  double left = simpson(f, a, m);
  double right = simpson(f, m, b);
  if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return adaptive_simpson(f, a, m, 0.5 * tol, depth - 1) +
         adaptive_simpson(f, m, b, 0.5 * tol, depth - 1);
}

double tail_integral_hermite(int n_plus_1, double t) {
  // integrate H_{n+1} phi from t to t+46 (the rest is below 1e-16); unit
  // panels keep the adaptive rule from early-accepting across the bump
  auto f = [n_plus_1](double x) {
    return hermite(n_plus_1, x) * gaussian_density(x);
  };
  double sum = 0.0;
  for (int i = 0; i < 46; ++i)
    sum += adaptive_simpson(f, t + i, t + i + 1.0, 1e-13, 30);
  return sum;
}

// --- A1 ---------------------------------------------------------------

CriterionResult criterion_a1(const Config& cfg) {
  Check c;
  const std::int64_t n = 1'000'000;
  RngStream rng(cfg.seed, 101);
  Welford w = run_batched<Welford>(
      n, rng, cfg.threads, [](RngStream& r, Welford& acc) {
        double chi = sample_chi_variable(4, r);
        acc.add(1.0 / (chi * chi));
      });
  MCEstimate e = w.estimate(cfg.seed);
  double z = std::abs(e.value - 0.5) / e.std_error;
  c.require(z <= 3.0, "mean 1/chi4^2 = " + fmt(e.value) + " vs 0.5, z = " +
                          fmt(z));
  return {"A1", c.pass, true, c.detail, 0.0};
}

// --- A2 ---------------------------------------------------------------

CriterionResult criterion_a2(const Config& cfg) {
  Check c;
  const HessianModel2D berry{0.5, 0.5};
  const std::int64_t n = cfg.quick ? 2'000'000 : 10'000'000;
  const double ts[4] = {0.0, 1.0, 2.0, 3.0};
  for (int i = 0; i < 4; ++i) {
    RngStream rng(cfg.seed, 210 + i);
    kacrice::A1A2 est =
        kacrice::estimate_a1_a2(ts[i], berry, n, rng, cfg.threads, true);
    double closed = analytic::ec_density_a1(ts[i], berry);
    double z = std::abs(est.a1.value - closed) / est.a1.std_error;
    c.require(z <= 3.0, "t=" + fmt(ts[i]) + " a1 = " + fmt(est.a1.value) +
                            " vs " + fmt(closed) + ", z = " + fmt(z));
  }
  return {"A2", c.pass, true, c.detail, 0.0};
}

// --- A3 ---------------------------------------------------------------

CriterionResult criterion_a3(const Config& cfg) {
  Check c;
  const HessianModel2D berry{0.5, 0.5};
  const std::int64_t n = cfg.quick ? 2'000'000 : 10'000'000;
  RngStream rng3(cfg.seed, 301);
  RngStream rng4(cfg.seed, 302);
  kacrice::A1A2 e3 = kacrice::estimate_a1_a2(3.0, berry, n, rng3, cfg.threads);
  kacrice::A1A2 e4 = kacrice::estimate_a1_a2(4.0, berry, n, rng4, cfg.threads);
  double c3 = analytic::ec_density_a1(3.0, berry);
  double c4 = analytic::ec_density_a1(4.0, berry);
  double ratio3 = e3.dk.value / c3;
  double ratio4 = e4.dk.value / c4;
  double tol3 = std::max(0.02, 3.0 * e3.dk.std_error / c3);
  double tol4 = std::max(0.005, 3.0 * e4.dk.std_error / c4);
  c.require(std::abs(ratio3 - 1.0) <= tol3,
            "Dk/A1 ratio(t=3) = " + fmt(ratio3));
  c.require(std::abs(ratio4 - 1.0) <= tol4,
            "Dk/A1 ratio(t=4) = " + fmt(ratio4));
  double decay_bound = std::abs(e3.a2.value) * std::exp(-2.0);
  c.require(std::abs(e4.a2.value) <= decay_bound,
            "|A2(4)| = " + fmt(std::abs(e4.a2.value)) + " <= |A2(3)| e^-2 = " +
                fmt(decay_bound));
  return {"A3", c.pass, true, c.detail, 0.0};
}

// --- A4 + A7 (shared realizations) ------------------------------------

struct SphereRunStats {
  Welford maxima_t25, maxima_t30, signed_ec_t3;
  int pixel_agree = 0;
  int realizations = 0;
};

SphereRunStats run_sphere_experiment(const Config& cfg, int n_real) {
  const PowerSpectrum spec = PowerSpectrum::single_l(6, 1.0);
  const IcoSphere grid = make_icosphere(icosphere_depth_for_lmax(6) + 1);
  const IcoSphere pixel_grid = make_icosphere(7);
  RngStream base(cfg.seed, 400);
  SphereRunStats st;
  for (int i = 0; i < n_real; ++i) {
    RngStream rng = base;
    rng.seek_block(static_cast<std::uint64_t>(i) * kBatchBlockStride);
    std::vector<fieldsim::SphericalFieldSample> comps;
    comps.push_back(fieldsim::synth_sphere(spec, rng));
    comps.push_back(fieldsim::synth_sphere(spec, rng));
    fieldsim::SphericalChiField f2 = fieldsim::assemble_chi(std::move(comps));
    auto points = critcount::find_critical_points(f2, 2.5, grid);
    st.maxima_t25.add(critcount::count_maxima_above(points, 2.5));
    st.maxima_t30.add(critcount::count_maxima_above(points, 3.0));
    int chi = critcount::signed_euler_count(points, 3.0);
    st.signed_ec_t3.add(chi);
    int pix = critcount::pixel_euler_characteristic(f2, 3.0, pixel_grid);
    if (pix == chi) ++st.pixel_agree;
    ++st.realizations;
  }
  return st;
}

CriterionResult criterion_a4(const Config& cfg, const SphereRunStats& st) {
  Check c;
  const double r = std::sqrt(21.0);
  const double ts[2] = {2.5, 3.0};
  const Welford* counts[2] = {&st.maxima_t25, &st.maxima_t30};
  for (int i = 0; i < 2; ++i) {
    MCEstimate e = counts[i]->estimate(cfg.seed);
    double closed =
        analytic::maxima_density_sphere(r, ts[i], SignVariant::corrected);
    double tol = std::max(0.10 * closed, 3.0 * e.std_error);
    c.require(std::abs(e.value - closed) <= tol,
              "mean maxima(t=" + fmt(ts[i]) + ") = " + fmt(e.value) + " vs " +
                  fmt(closed));
  }
  // discriminators against the "-2" text variant
  MCEstimate e25 = st.maxima_t25.estimate(cfg.seed);
  double text_value =
      analytic::maxima_density_sphere(r, 2.5, SignVariant::paper_text);
  bool text_outside = std::abs(e25.value - text_value) > 3.0 * e25.std_error;
  c.note(std::string("text variant (-2) ") +
         (text_outside ? "outside" : "inside") + " 3 SE band at t=2.5");

  RngStream rng(cfg.seed, 450);
  auto rep = critcount::hessian_covariance_oracle(
      OracleSource::sphere(PowerSpectrum::single_l(2, 1.0)), 20000, rng);
  double z_plus =
      std::abs(rep.c_minus_sigma2.value - 1.0 / 3.0) / rep.c_minus_sigma2.std_error;
  double z_minus =
      std::abs(rep.c_minus_sigma2.value + 1.0 / 3.0) / rep.c_minus_sigma2.std_error;
  bool oracle_adjudicates = z_plus <= 3.0 && z_minus > 10.0;
  c.note("oracle c-sigma^2 = " + fmt(rep.c_minus_sigma2.value) +
         " (z vs +1/3: " + fmt(z_plus) + ", z vs -1/3: " + fmt(z_minus) + ")");
  c.require(text_outside || oracle_adjudicates,
            "at least one sign discriminator");
  return {"A4", c.pass, true, c.detail, 0.0};
}

CriterionResult criterion_a7(const Config& cfg, const SphereRunStats& st) {
  Check c;
  MCEstimate e = st.signed_ec_t3.estimate(cfg.seed);
  double closed =
      analytic::ec_sum_product(analytic::lk_sphere_circle(std::sqrt(21.0)), 3.0);
  double z = std::abs(e.value - closed) / e.std_error;
  c.require(z <= 3.0, "mean signed EC(t=3) = " + fmt(e.value) + " vs " +
                          fmt(closed) + ", z = " + fmt(z));
  double agree =
      static_cast<double>(st.pixel_agree) / st.realizations;
  c.require(agree >= 0.99, "pixel-EC agreement " + fmt(100.0 * agree) + "%");
  return {"A7", c.pass, true, c.detail, 0.0};
}

// --- A5 ---------------------------------------------------------------

struct OracleTarget {
  double var_h1, cov_h13, var_h2;
};

void check_oracle(Check& c, const std::string& name,
                  const critcount::CovarianceOracleReport& rep,
                  const OracleTarget& target) {
  auto zed = [](const MCEstimate& e, double t) {
    return std::abs(e.value - t) / e.std_error;
  };
  double z1 = zed(rep.var_h1, target.var_h1);
  double z2 = zed(rep.cov_h13, target.cov_h13);
  double z3 = zed(rep.var_h2, target.var_h2);
  double z4 = zed(rep.e_h1_gamma, -1.0);
  double worst = std::max({z1, z2, z3, z4});
  c.require(worst <= 3.0,
            name + " (var h1, cov h13, var h2, E h1g) = (" +
                fmt(rep.var_h1.value) + ", " + fmt(rep.cov_h13.value) + ", " +
                fmt(rep.var_h2.value) + ", " + fmt(rep.e_h1_gamma.value) +
                ") vs (" + fmt(target.var_h1) + ", " + fmt(target.cov_h13) +
                ", " + fmt(target.var_h2) + ", -1), max z = " + fmt(worst));
}

CriterionResult criterion_a5(const Config& cfg) {
  Check c;
  const std::int64_t n = cfg.quick ? 20000 : 100000;
  {
    RngStream rng(cfg.seed, 501);
    auto rep = critcount::hessian_covariance_oracle(
        OracleSource::bargmann_fock(2.0), n, rng);
    // covariance e^{-|x-y|^2/2} has K''''(0) = 3; the printed catalog value
    // 2*(1,1/3,1/3) does not match its own covariance and is reported as
    // rejected alongside
    check_oracle(c, "bargmann-fock", rep, {3.0, 1.0, 1.0});
    double z_text = std::abs(rep.var_h1.value - 2.0) / rep.var_h1.std_error;
    c.note("catalog text value var h1 = 2 rejected at z = " + fmt(z_text));
    c.require(rep.fd_max_error < 1e-6, "fd cross-check");
  }
  {
    RngStream rng(cfg.seed, 502);
    auto rep = critcount::hessian_covariance_oracle(
        OracleSource::berry(cfg.quick ? 1024 : 4096), n, rng);
    check_oracle(c, "berry", rep, {1.5, 0.5, 0.5});
    c.require(rep.fd_max_error < 1e-6, "fd cross-check");
  }
  {
    RngStream rng(cfg.seed, 503);
    auto rep = critcount::hessian_covariance_oracle(
        OracleSource::sphere(PowerSpectrum::single_l(2, 1.0)), n, rng);
    // r^2 = 3: corrected c - sigma^2 = 1/r^2 = 1/3; the -1/3, 1/9 and -1/9
    // variants all have to be rejected
    MCEstimate cms = rep.c_minus_sigma2;
    double z = std::abs(cms.value - 1.0 / 3.0) / cms.std_error;
    c.require(z <= 3.0, "sphere c-sigma^2 = " + fmt(cms.value) +
                            " vs +1/3, z = " + fmt(z));
    double z_alt = std::min({std::abs(cms.value + 1.0 / 3.0),
                             std::abs(cms.value - 1.0 / 9.0),
                             std::abs(cms.value + 1.0 / 9.0)}) /
                   cms.std_error;
    c.require(z_alt > 10.0, "alternates (-1/3, +1/9, -1/9) rejected, min z = " +
                                fmt(z_alt));
    c.require(std::abs(rep.e_h1_gamma.value + 1.0) /
                      rep.e_h1_gamma.std_error <=
                  3.0,
              "sphere E[h1 gamma] = " + fmt(rep.e_h1_gamma.value));
  }
  return {"A5", c.pass, true, c.detail, 0.0};
}

// --- A6 ---------------------------------------------------------------

CriterionResult criterion_a6(const Config& cfg) {
  Check c;
  const PowerSpectrum spec = PowerSpectrum::single_l(4, 1.0);
  auto sm = analytic::spherical_hessian_model(spec);
  kacrice::CountFormulaInput input;
  input.k = 4;
  input.m = 2;
  input.t = 2.0;
  input.volume = 4.0 * kPi * sm.r2;
  input.model = sm.model;
  RngStream rng_kr(cfg.seed, 601);
  MCEstimate kr =
      kacrice::expected_critical_points(input, 1'000'000, rng_kr, cfg.threads);
  input.variant = SignVariant::paper_text;
  RngStream rng_kt(cfg.seed, 601);
  MCEstimate kr_text =
      kacrice::expected_critical_points(input, 1'000'000, rng_kt, cfg.threads);

  const int n_real = 200;
  const IcoSphere grid = make_icosphere(icosphere_depth_for_lmax(4) + 1);
  RngStream base(cfg.seed, 602);
  Welford direct;
  for (int i = 0; i < n_real; ++i) {
    RngStream rng = base;
    rng.seek_block(static_cast<std::uint64_t>(i) * kBatchBlockStride);
    std::vector<fieldsim::SphericalFieldSample> comps;
    for (int q = 0; q < 4; ++q)
      comps.push_back(fieldsim::synth_sphere(spec, rng));
    fieldsim::SphericalChiField f4 = fieldsim::assemble_chi(std::move(comps));
    auto points = critcount::find_critical_points(f4, 2.0, grid);
    direct.add(static_cast<double>(points.size()));
  }
  MCEstimate de = direct.estimate(cfg.seed);
  double rel = std::abs(de.value - kr.value) / kr.value;
  c.require(rel <= 0.10, "direct mean = " + fmt(de.value) + " (se " +
                             fmt(de.std_error) + ") vs kac-rice " +
                             fmt(kr.value) + " (se " + fmt(kr.std_error) +
                             "), rel diff = " + fmt(rel));
  double rel_text = std::abs(de.value - kr_text.value) / kr_text.value;
  c.note("split-constant text variant = " + fmt(kr_text.value) +
         " rejected (rel diff " + fmt(rel_text) + ")");
  return {"A6", c.pass, true, c.detail, 0.0};
}

// --- A8 ---------------------------------------------------------------

CriterionResult criterion_a8(const Config& cfg) {
  Check c;
  // Hermite tail identity against quadrature
  double worst_tail = 0.0;
  for (int n = 0; n <= 6; ++n)
    for (double t = -5.0; t <= 5.0; t += 0.5) {
      double lhs = tail_integral_hermite(n + 1, t);
      double rhs = hermite_weighted(n, t);
      worst_tail = std::max(worst_tail, std::abs(lhs - rhs));
    }
  c.require(worst_tail < 1e-8,
            "hermite tail identity, worst = " + fmt(worst_tail));

  // Wishart mean k I
  {
    const int k = 3, m = 2;
    RngStream rng(cfg.seed, 801);
    Welford diag[2], off;
    for (int i = 0; i < 100000; ++i) {
      SymMatrix a = ensembles::sample_wishart(k, m, rng);
      diag[0].add(a(0, 0));
      diag[1].add(a(1, 1));
      off.add(a(0, 1));
    }
    double z = 0.0;
    for (auto& d : diag) {
      MCEstimate e = d.estimate(cfg.seed);
      z = std::max(z, std::abs(e.value - k) / e.std_error);
    }
    MCEstimate eo = off.estimate(cfg.seed);
    z = std::max(z, std::abs(eo.value) / eo.std_error);
    c.require(z <= 3.0, "wishart mean kI, max z = " + fmt(z));
  }

  // E[H gamma] = -I for the catalog models
  {
    const HessianModel2D models[3] = {
        {0.5, 0.5},                                 // berry
        analytic::planar_hessian_model(3.0),        // bargmann-fock
        analytic::spherical_hessian_model(PowerSpectrum::single_l(2, 1.0))
            .model};
    double worst = 0.0;
    for (int i = 0; i < 3; ++i) {
      RngStream rng(cfg.seed, 810 + i);
      auto law = ensembles::GaussianHessianLaw::from_model(models[i]);
      auto chk = ensembles::validate_hessian_like(law, 200000, rng);
      worst = std::max(worst, chk.max_z);
    }
    c.require(worst <= 3.0, "E[H gamma] = -I, max z = " + fmt(worst));
  }

  // rotation invariance of the sampled Hessian covariance
  {
    const HessianModel2D berry{0.5, 0.5};
    const double th = kPi / 7.0;
    const double cs = std::cos(th), sn = std::sin(th);
    RngStream rng(cfg.seed, 820);
    Welford v1, v2, c13, x12, x23;
    for (int i = 0; i < 200000; ++i) {
      auto d = ensembles::sample_hessian_like_2d(berry, rng);
      double h1 = d.h(0, 0), h2 = d.h(0, 1), h3 = d.h(1, 1);
      // R^T H R with R = rotation by pi/7
      double r1 = cs * cs * h1 + 2.0 * cs * sn * h2 + sn * sn * h3;
      double r3 = sn * sn * h1 - 2.0 * cs * sn * h2 + cs * cs * h3;
      double r2 = (cs * cs - sn * sn) * h2 + cs * sn * (h3 - h1);
      v1.add(r1 * r1);
      v2.add(r2 * r2);
      c13.add(r1 * r3);
      x12.add(r1 * r2);
      x23.add(r2 * r3);
    }
    double diag = 2.0 * berry.sigma2 + berry.c;
    auto z_of = [&](Welford& w, double target) {
      MCEstimate e = w.estimate(cfg.seed);
      return std::abs(e.value - target) / e.std_error;
    };
    double z = std::max({z_of(v1, diag), z_of(v2, berry.sigma2),
                         z_of(c13, berry.c), z_of(x12, 0.0), z_of(x23, 0.0)});
    c.require(z <= 3.0, "rotated-H covariance, max z = " + fmt(z));
  }

  // FD vs analytic derivatives (centered stencils, h^2 term extrapolated)
  {
    RngStream rng(cfg.seed, 830);
    PowerSpectrum spec({{2, 1.0}, {5, 0.7}, {8, 0.4}});
    auto sample = fieldsim::synth_sphere(spec, rng);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
      Vec3 p = normalized({rng.normal(), rng.normal(), rng.normal()});
      fieldsim::Jet2 ja = sample.eval(p, 2);
      auto fd_at = [&](double h) {
        return fieldsim::fd_jet_sphere(
            [&](const Vec3& q) { return sample.value(q); }, p, h);
      };
      fieldsim::Jet2 fa = fd_at(1e-3), fb = fd_at(5e-4);
      auto rich = [](double coarse, double fine) {
        return (4.0 * fine - coarse) / 3.0;
      };
      worst = std::max(
          {worst,
           std::abs(ja.grad[0] - rich(fa.grad[0], fb.grad[0])),
           std::abs(ja.grad[1] - rich(fa.grad[1], fb.grad[1])),
           std::abs(ja.hess(0, 0) - rich(fa.hess(0, 0), fb.hess(0, 0))),
           std::abs(ja.hess(0, 1) - rich(fa.hess(0, 1), fb.hess(0, 1))),
           std::abs(ja.hess(1, 1) - rich(fa.hess(1, 1), fb.hess(1, 1)))});
    }
    c.require(worst < 1e-6, "sphere FD vs analytic, worst = " + fmt(worst));
  }

  // bitwise determinism under a fixed seed, independent of thread count
  {
    const HessianModel2D berry{0.5, 0.5};
    RngStream r1(cfg.seed, 840), r2(cfg.seed, 840);
    MCEstimate e1 = kacrice::estimate_Ek(3, 1.0, berry, 200000, r1, 1);
    MCEstimate e2 = kacrice::estimate_Ek(3, 1.0, berry, 200000, r2, 2);
    bool same = e1.value == e2.value && e1.std_error == e2.std_error;
    RngStream s1(cfg.seed, 841), s2(cfg.seed, 841);
    auto f1 = fieldsim::synth_sphere(PowerSpectrum::single_l(4, 1.0), s1);
    auto f2 = fieldsim::synth_sphere(PowerSpectrum::single_l(4, 1.0), s2);
    for (int l = 4, m = -l; m <= l; ++m)
      same = same && f1.coeff(l, m) == f2.coeff(l, m);
    c.require(same, "bitwise determinism");
  }
  return {"A8", c.pass, true, c.detail, 0.0};
}

CriterionResult timed(CriterionResult (*fn)(const Config&), const Config& cfg) {
  auto t0 = std::chrono::steady_clock::now();
  CriterionResult r = fn(cfg);
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                            t0)
                  .count();
  return r;
}

}  // namespace

std::vector<CriterionResult> run_acceptance(const Config& cfg) {
  std::vector<CriterionResult> out;
  out.push_back(timed(criterion_a1, cfg));
  out.push_back(timed(criterion_a2, cfg));
  out.push_back(timed(criterion_a3, cfg));

  if (cfg.quick) {
    out.push_back({"A4", false, false, "skipped (quick)", 0.0});
  } else {
    auto t0 = std::chrono::steady_clock::now();
    SphereRunStats st = run_sphere_experiment(cfg, 300);
    double shared = std::chrono::duration<double>(
                        std::chrono::steady_clock::now() - t0)
                        .count();
    CriterionResult a4 = criterion_a4(cfg, st);
    a4.seconds = shared;
    out.push_back(a4);
    out.push_back(timed(criterion_a5, cfg));
    out.push_back(timed(criterion_a6, cfg));
    CriterionResult a7 = criterion_a7(cfg, st);
    out.push_back(a7);
    out.push_back(timed(criterion_a8, cfg));
    return out;
  }

  out.push_back(timed(criterion_a5, cfg));
  out.push_back({"A6", false, false, "skipped (quick)", 0.0});
  out.push_back({"A7", false, false, "skipped (quick)", 0.0});
  out.push_back(timed(criterion_a8, cfg));
  return out;
}

bool all_passed(const std::vector<CriterionResult>& results) {
  for (const auto& r : results)
    if (r.ran && !r.pass) return false;
  return true;
}

std::string render_report(const std::vector<CriterionResult>& results) {
  std::ostringstream os;
  for (const auto& r : results) {
    os << r.id << " "
       << (r.ran ? (r.pass ? "PASS" : "FAIL") : "SKIP") << " ["
       << fmt(r.seconds) << "s] " << r.detail << "\n";
  }
  return os.str();
}

}  // namespace chirf::acceptance
