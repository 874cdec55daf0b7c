#ifndef CHIRF_ENSEMBLES_HPP
#define CHIRF_ENSEMBLES_HPP

#include <span>
#include <vector>

#include "chirf/analytic.hpp"
#include "chirf/linalg.hpp"
#include "chirf/rng.hpp"

namespace chirf::ensembles {

using analytic::HessianModel2D;

// One draw of a Hessian-like pair: symmetric H plus the coupled unit
// Gaussian gamma with E[H gamma] = -I.
struct HessianDraw {
  SymMatrix h;
  double gamma = 0.0;
};

// chi_k draw.
double sample_chi(int k, RngStream& rng);

// Gram matrix of m i.i.d. standard Gaussian k-vectors (Wishart W_m(I, k)).
// k = 0 yields the zero matrix.
SymMatrix sample_wishart(int k, int m, RngStream& rng);

// Draw (h1, h2, h3) from the rotation-invariant covariance and gamma from
//   gamma = -tr(H) / (2 (sigma^2 + c)) + gamma0 sqrt(1 - 1/(sigma^2 + c)).
// Models with sigma^2 + c = 1 take the exact deterministic branch (no
// gamma0 draw).  Requires model.hessian_like().
HessianDraw sample_hessian_like_2d(const HessianModel2D& model,
                                   RngStream& rng);

// Bordered (m+k-1) x (m+k-1) matrix: H in the top-left block, -gamma I in
// the bottom-right, i.i.d. N(0,1) border independent of (H, gamma).
SymMatrix assemble_tilde_h(const HessianDraw& draw, int k, RngStream& rng);

// Same with caller-supplied border entries, row-major m x (k-1); lets tests
// pin the border (e.g. zero it, which gives det = -gamma * det H).
SymMatrix assemble_tilde_h(const HessianDraw& draw, int k,
                           std::span<const double> border);

// Joint Gaussian law of (vec H, gamma) for an m x m symmetric H, vec in
// packed upper-triangle order with gamma last.  Supports both unconditional
// draws and draws of H given gamma (the factored pieces are precomputed, so
// degenerate models, sigma^2 + c = 1, take an exact deterministic branch).
class GaussianHessianLaw {
 public:
  // dense covariance of (vec H, gamma), size d x d with d = m(m+1)/2 + 1.
  static GaussianHessianLaw from_covariance(std::vector<double> dense, int m);
  static GaussianHessianLaw from_model(const HessianModel2D& model);

  int m() const { return m_; }
  HessianDraw sample(RngStream& rng) const;
  // H | gamma = g (Gaussian conditioning on the unit-variance gamma).
  SymMatrix sample_given_gamma(double g, RngStream& rng) const;

 private:
  GaussianHessianLaw() = default;
  int m_ = 0;
  int d_ = 0;
  std::vector<double> chol_;       // d x d lower factor of the joint law
  std::vector<double> cond_mean_;  // E[vec H | gamma = 1] = cov(vec H, gamma)
  std::vector<double> cond_chol_;  // (d-1) x (d-1) factor of the conditional
};

// Empirical check that E[H gamma] = -I under a law; reports the worst
// absolute deviation and its z-score over n draws.
struct HessianLikeCheck {
  double max_abs_deviation = 0.0;
  double max_z = 0.0;
};

HessianLikeCheck validate_hessian_like(const GaussianHessianLaw& law,
                                       std::int64_t n, RngStream& rng);

}  // namespace chirf::ensembles

#endif
