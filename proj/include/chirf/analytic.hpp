#ifndef CHIRF_ANALYTIC_HPP
#define CHIRF_ANALYTIC_HPP

#include <cmath>
#include <utility>
#include <vector>

#include "chirf/special.hpp"

namespace chirf::analytic {

// Which sign convention the spherical-Hessian catalog and the sphere maxima
// density use.  `corrected` follows the self-consistent curvature/kinematic
// derivation (c - sigma^2 = +1/r^2, "+2" in the maxima density);
// `paper_text` reproduces the published text variant ("-2", and the
// covariance matrix as printed) for side-by-side comparison.
enum class SignVariant { corrected, paper_text };

// Angular power spectrum {(l, C_l)}.  All C_l >= 0 and at least one l >= 1
// entry positive, so K(0) > 0 and -K''(0) > 0.
class PowerSpectrum {
 public:
  PowerSpectrum(std::vector<std::pair<int, double>> entries);

  static PowerSpectrum single_l(int l, double c_l);

  const std::vector<std::pair<int, double>>& entries() const {
    return entries_;
  }
  int max_l() const;

  // Copy rescaled so that K(0) = 1.
  PowerSpectrum normalized() const;

 private:
  std::vector<std::pair<int, double>> entries_;
};

// Covariance derivatives at the origin.
// K0 = K(0)      = sum (2l+1)/(4pi) C_l
// K2 = K''(0)    = -sum (2l+1)/(4pi) * l(l+1)/2 * C_l
// K4 = K''''(0)  = sum (2l+1)/(4pi) * (3 l(l+1)(l(l+1)-2)/8 + l(l+1)/2) C_l
struct SpectralMoments {
  double k0 = 0.0;
  double k2 = 0.0;
  double k4 = 0.0;
};

SpectralMoments spectral_moments(const PowerSpectrum& spec);

// Covariance parameters (sigma^2, c) of a rotation-invariant 2x2 Gaussian
// Hessian H = [[h1, h2], [h2, h3]]:
//   var(h1) = var(h3) = 2 sigma^2 + c,  cov(h1, h3) = c,
//   var(h2) = sigma^2, h2 independent of (h1, h3).
// H admits a unit Gaussian gamma with E[H gamma] = -I iff sigma^2 + c >= 1:
//   gamma = -tr(H)/(2(sigma^2+c)) + gamma0 * sqrt(1 - 1/(sigma^2+c)).
struct HessianModel2D {
  double sigma2 = 0.0;
  double c = 0.0;

  bool hessian_like() const { return sigma2 + c >= 1.0 - 1e-12; }
  double gamma_trace_coeff() const { return 1.0 / (2.0 * (sigma2 + c)); }
  double gamma_noise_coeff() const {
    double v = 1.0 - 1.0 / (sigma2 + c);
    return v > 0.0 ? std::sqrt(v) : 0.0;
  }
};

// Stationary isotropic plane field: sigma^2 = c = K4 / 3.
HessianModel2D planar_hessian_model(double k4);

// Model of the Riemannian Hessian of the unit-variance field on the radius-r
// sphere, r^2 = -K''(0), a^2 = K''''(0).  With the corrected variant
//   c = (a^2 + 2 r^2) / (3 r^4),  sigma^2 = (a^2 - r^2) / (3 r^4),
// so c - sigma^2 = 1/r^2 for every valid spectrum.
struct SphericalHessianModel {
  HessianModel2D model;
  double r2 = 0.0;  // -K''(0) after unit normalization
  double a2 = 0.0;  // K''''(0) after unit normalization
};

SphericalHessianModel spherical_hessian_model(
    const PowerSpectrum& spec, SignVariant variant = SignVariant::corrected);

// A1 density (H_2(t) + (c - sigma^2)) * phi(t): the signed-determinant part
// of the maxima functional, exact for every t.
double ec_density_a1(double t, const HessianModel2D& model);

// High-threshold density of maxima of a 2-component chi field on the
// radius-r sphere: (2 r^2 H_2(t) + 2) sqrt(2 pi) phi(t) (corrected), or the
// "-2" text variant.
double maxima_density_sphere(double r, double t,
                             SignVariant variant = SignVariant::corrected);

// Lipschitz-Killing curvature sequence L_0..L_d of a product manifold,
// with the radius kept for provenance.
struct ProductLK {
  std::vector<double> curvatures;
  double radius = 1.0;
};

// L(rS^2 x S^1) = (0, 4 pi, 0, 8 pi^2 r^2) from the product formula with
// L(S^1) = (0, 2 pi) and L(rS^2) = (2, 0, 4 pi r^2).
ProductLK lk_sphere_circle(double r);

// sum_j L_j (2 pi)^{-j/2} H_{j-1}(t) phi(t), the expected excursion-set
// Euler characteristic; the j = 0 term uses the tail ratio (H_{-1} phi = Psi).
double ec_sum_product(const ProductLK& lk, double t);

// E[vol_{m-k}(zero set)] = vol(S^{m-k}) / vol(S^m) * vol(M) for k <= m.
double expected_nodal_volume(int k, int m, double manifold_volume);

}  // namespace chirf::analytic

#endif
