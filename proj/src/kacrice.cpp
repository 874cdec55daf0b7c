#include "chirf/kacrice.hpp"

#include <cmath>
#include <stdexcept>

namespace chirf::kacrice {

namespace {

MCEstimate scaled(MCEstimate e, double factor) {
  e.value *= factor;
  e.std_error *= std::abs(factor);
  return e;
}

// det(A + chi H + chi (gamma - chi) I) for the m x m blocks.
double shifted_det(const SymMatrix& a, const SymMatrix& h, double chi,
                   double shift) {
  const int m = a.dim();
  SymMatrix s(m);
  for (int i = 0; i < m; ++i)
    for (int j = i; j < m; ++j) {
      double v = a(i, j) + chi * h(i, j);
      if (i == j) v += shift;
      s.at(i, j) = v;
    }
  return sym_det(s);
}

SymMatrix negated(const SymMatrix& a) {
  const int n = a.dim();
  SymMatrix s(n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) s.at(i, j) = -a(i, j);
  return s;
}

struct TripleAcc {
  Welford a1, a2, dk;
  void combine(const TripleAcc& o) {
    a1.combine(o.a1);
    a2.combine(o.a2);
    dk.combine(o.dk);
  }
};

}  // namespace

MCEstimate estimate_Ek(int k, double t, const GaussianHessianLaw& law,
                       std::int64_t n, const RngStream& rng, int threads) {
  if (k < 1) throw std::invalid_argument("estimate_Ek: k must be >= 1");
  if (n < 1) throw std::invalid_argument("estimate_Ek: n must be >= 1");
  const int m = law.m();
  Welford w = run_batched<Welford>(n, rng, threads, [&](RngStream& r,
                                                        Welford& acc) {
    ensembles::HessianDraw hd = law.sample(r);
    double chi = sample_chi_variable(k, r);
    SymMatrix a = ensembles::sample_wishart(k - 1, m, r);
    double value = 0.0;
    if (chi >= t)
      value = std::abs(shifted_det(a, hd.h, chi, chi * (hd.gamma - chi)));
    acc.add(value);
  });
  return w.estimate(rng.seed());
}

MCEstimate estimate_Ek(int k, double t, const HessianModel2D& model,
                       std::int64_t n, const RngStream& rng, int threads) {
  return estimate_Ek(k, t, GaussianHessianLaw::from_model(model), n, rng,
                     threads);
}

MCEstimate estimate_Ek_weighted(int k, double t, const GaussianHessianLaw& law,
                                std::int64_t n, const RngStream& rng,
                                int threads) {
  if (k < 1)
    throw std::invalid_argument("estimate_Ek_weighted: k must be >= 1");
  if (n < 1)
    throw std::invalid_argument("estimate_Ek_weighted: n must be >= 1");
  const int m = law.m();
  Welford w = run_batched<Welford>(
      n, rng, threads, [&](RngStream& r, Welford& acc) {
        ensembles::HessianDraw hd = law.sample(r);
        double chi = sample_chi_variable(k, r);
        SymMatrix a = ensembles::sample_wishart(k - 1, m, r);
        double value = 0.0;
        if (chi >= t)
          value = std::pow(chi, -m) *
                  std::abs(shifted_det(a, hd.h, chi, chi * (hd.gamma - chi)));
        acc.add(value);
      });
  return w.estimate(rng.seed());
}

MCEstimate estimate_Ek_weighted(int k, double t, const HessianModel2D& model,
                                std::int64_t n, const RngStream& rng,
                                int threads) {
  return estimate_Ek_weighted(k, t, GaussianHessianLaw::from_model(model), n,
                              rng, threads);
}

MCEstimate estimate_Dk(int k, double t, const GaussianHessianLaw& law,
                       std::int64_t n, const RngStream& rng, int threads,
                       bool importance_gamma) {
  if (k < 2) throw std::invalid_argument("estimate_Dk: k must be >= 2");
  if (n < 1) throw std::invalid_argument("estimate_Dk: n must be >= 1");
  const double tail = gaussian_upper_tail(t);
  Welford w = run_batched<Welford>(
      n, rng, threads, [&](RngStream& r, Welford& acc) {
        // Psi(t) underflows past t ~ 38.5; the estimate is exactly zero
        if (importance_gamma && tail <= 0.0) {
          acc.add(0.0);
          return;
        }
        double gamma, weight;
        SymMatrix h;
        if (importance_gamma) {
          gamma = sample_truncated_upper_normal(t, r);
          weight = tail;
          h = law.sample_given_gamma(gamma, r);
        } else {
          ensembles::HessianDraw hd = law.sample(r);
          gamma = hd.gamma;
          weight = 1.0;
          h = hd.h;
        }
        double value = 0.0;
        if (gamma >= t) {
          ensembles::HessianDraw hd{h, gamma};
          SymMatrix ht = ensembles::assemble_tilde_h(hd, k, r);
          SymMatrix neg = negated(ht);
          if (sym_is_positive_definite(neg))
            value = weight * std::abs(sym_det(ht));
        }
        acc.add(value);
      });
  return w.estimate(rng.seed());
}

MCEstimate estimate_Dk(int k, double t, const HessianModel2D& model,
                       std::int64_t n, const RngStream& rng, int threads,
                       bool importance_gamma) {
  return estimate_Dk(k, t, GaussianHessianLaw::from_model(model), n, rng,
                     threads, importance_gamma);
}

A1A2 estimate_a1_a2(double t, const HessianModel2D& model, std::int64_t n,
                    const RngStream& rng, int threads, bool importance_gamma) {
  if (n < 1) throw std::invalid_argument("estimate_a1_a2: n must be >= 1");
  const GaussianHessianLaw law = GaussianHessianLaw::from_model(model);
  const double tail = gaussian_upper_tail(t);
  TripleAcc acc = run_batched<TripleAcc>(
      n, rng, threads, [&](RngStream& r, TripleAcc& a) {
        if (importance_gamma && tail <= 0.0) {
          a.a1.add(0.0);
          a.a2.add(0.0);
          a.dk.add(0.0);
          return;
        }
        double gamma, weight;
        SymMatrix h;
        if (importance_gamma) {
          gamma = sample_truncated_upper_normal(t, r);
          weight = tail;
          h = law.sample_given_gamma(gamma, r);
        } else {
          ensembles::HessianDraw hd = law.sample(r);
          gamma = hd.gamma;
          weight = 1.0;
          h = hd.h;
        }
        double v1 = 0.0, v2 = 0.0;
        if (gamma >= t) {
          ensembles::HessianDraw hd{h, gamma};
          SymMatrix ht = ensembles::assemble_tilde_h(hd, 2, r);
          // 3x3: det(-H~) = -det(H~)
          double det_neg = -sym_det(ht);
          v1 = weight * det_neg;
          if (!sym_is_positive_definite(negated(ht))) v2 = -v1;
        }
        a.a1.add(v1);
        a.a2.add(v2);
        a.dk.add(v1 + v2);
      });
  A1A2 out;
  out.a1 = acc.a1.estimate(rng.seed());
  out.a2 = acc.a2.estimate(rng.seed());
  out.dk = acc.dk.estimate(rng.seed());
  return out;
}

MCEstimate expected_critical_points(const CountFormulaInput& input,
                                    std::int64_t n, const RngStream& rng,
                                    int threads) {
  if (input.k <= input.m)
    throw std::domain_error(
        "expected_critical_points: requires k > m (no density otherwise)");
  if (input.m != 2)
    throw std::invalid_argument("expected_critical_points: catalog path is m = 2");
  if (!input.isotropic)
    throw std::invalid_argument(
        "expected_critical_points: non-isotropic integrands need a manifold "
        "quadrature, not supported");
  if (!(input.volume > 0.0))
    throw std::invalid_argument("expected_critical_points: volume must be > 0");
  if (input.variant == analytic::SignVariant::paper_text) {
    MCEstimate ek = estimate_Ek(input.k, input.t, input.model, n, rng, threads);
    double factor = inv_chi_constant(input.k, input.m) *
                    std::pow(kTwoPi, -0.5 * input.m) * input.volume;
    return scaled(ek, factor);
  }
  MCEstimate ek =
      estimate_Ek_weighted(input.k, input.t, input.model, n, rng, threads);
  double factor = std::pow(kTwoPi, -0.5 * input.m) * input.volume;
  return scaled(ek, factor);
}

MCEstimate expected_maxima(const CountFormulaInput& input, std::int64_t n,
                           const RngStream& rng, int threads,
                           bool importance_gamma) {
  if (input.m != 2)
    throw std::invalid_argument("expected_maxima: catalog path is m = 2");
  if (input.k < 2)
    throw std::invalid_argument("expected_maxima: k must be >= 2");
  if (!input.isotropic)
    throw std::invalid_argument(
        "expected_maxima: non-isotropic integrands need a manifold "
        "quadrature, not supported");
  if (!(input.volume > 0.0))
    throw std::invalid_argument("expected_maxima: volume must be > 0");
  MCEstimate dk = estimate_Dk(input.k, input.t, input.model, n, rng, threads,
                              importance_gamma);
  double factor = sphere_surface_volume(input.k - 1) *
                  std::pow(kTwoPi, -0.5 * (input.m + input.k - 1)) *
                  input.volume;
  return scaled(dk, factor);
}

}  // namespace chirf::kacrice
