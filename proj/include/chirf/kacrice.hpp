#ifndef CHIRF_KACRICE_HPP
#define CHIRF_KACRICE_HPP

#include "chirf/analytic.hpp"
#include "chirf/ensembles.hpp"
#include "chirf/mc.hpp"

namespace chirf::kacrice {

using analytic::HessianModel2D;
using ensembles::GaussianHessianLaw;

// Monte Carlo estimate of
//   E_k^t(H) = E[ 1{chi_k >= t} |det(A(k-1,m) + chi_k H + chi_k (gamma - chi_k) I)| ]
// over mutually independent A, chi_k and (H, gamma).
MCEstimate estimate_Ek(int k, double t, const GaussianHessianLaw& law,
                       std::int64_t n, const RngStream& rng, int threads = 1);
MCEstimate estimate_Ek(int k, double t, const HessianModel2D& model,
                       std::int64_t n, const RngStream& rng, int threads = 1);

// Same integrand carrying the chi_k^{-m} gradient-density weight inside the
// expectation:
//   E[ chi_k^{-m} 1{chi_k >= t} |det(A(k-1,m) + chi_k H + chi_k (gamma - chi_k) I)| ].
// Conditioning the Kac-Rice density on dF = 0 tilts the law of |Y(p)| by
// exactly this weight, so it cannot be split off as the separate constant
// E[chi_k^{-m}]; the split version survives behind the paper_text variant
// and the direct critical-point counter is the arbiter between the two.
MCEstimate estimate_Ek_weighted(int k, double t, const GaussianHessianLaw& law,
                                std::int64_t n, const RngStream& rng,
                                int threads = 1);
MCEstimate estimate_Ek_weighted(int k, double t, const HessianModel2D& model,
                                std::int64_t n, const RngStream& rng,
                                int threads = 1);

// Monte Carlo estimate of
//   D_k^t(H) = E[ |det(tilde H)| 1{-tilde H pos. def.} 1{gamma >= t} ].
// With `importance_gamma` the gamma marginal is drawn conditioned on
// gamma >= t (inverse CDF) and reweighted by Psi(t); without it thresholds
// past t ~ 4 are out of reach at desk sample sizes.
MCEstimate estimate_Dk(int k, double t, const GaussianHessianLaw& law,
                       std::int64_t n, const RngStream& rng, int threads = 1,
                       bool importance_gamma = true);
MCEstimate estimate_Dk(int k, double t, const HessianModel2D& model,
                       std::int64_t n, const RngStream& rng, int threads = 1,
                       bool importance_gamma = true);

// Paired decomposition for m = k = 2:
//   a1 = E[det(-tilde H) 1{gamma >= t}]             (signed, no modulus)
//   a2 = -E[det(-tilde H) (1 - 1{PD}) 1{gamma >= t}]
//   dk = a1 + a2, accumulated from the same draws sample by sample.
struct A1A2 {
  MCEstimate a1;
  MCEstimate a2;
  MCEstimate dk;
};

A1A2 estimate_a1_a2(double t, const HessianModel2D& model, std::int64_t n,
                    const RngStream& rng, int threads = 1,
                    bool importance_gamma = true);

struct CountFormulaInput {
  int k = 0;
  int m = 2;
  double t = 0.0;
  double volume = 0.0;
  HessianModel2D model;
  bool isotropic = true;
  // corrected: (2 pi)^{-m/2} vol(M) * weighted functional (default);
  // paper_text: inv_chi_constant(k,m) (2 pi)^{-m/2} vol(M) * E_k^t, the
  // published split form.
  analytic::SignVariant variant = analytic::SignVariant::corrected;
};

// E[# critical points of f_k above t].  Requires k > m and the isotropic
// collapse of the manifold integral.
MCEstimate expected_critical_points(const CountFormulaInput& input,
                                    std::int64_t n, const RngStream& rng,
                                    int threads = 1);

// E[# maxima of f_k above t] =
//   vol(S^{k-1}) (2 pi)^{-(m+k-1)/2} vol(M) D_k^t.
MCEstimate expected_maxima(const CountFormulaInput& input, std::int64_t n,
                           const RngStream& rng, int threads = 1,
                           bool importance_gamma = true);

}  // namespace chirf::kacrice

#endif
