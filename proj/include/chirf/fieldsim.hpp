#ifndef CHIRF_FIELDSIM_HPP
#define CHIRF_FIELDSIM_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "chirf/analytic.hpp"
#include "chirf/geom.hpp"
#include "chirf/linalg.hpp"
#include "chirf/rng.hpp"

namespace chirf::fieldsim {

using analytic::PowerSpectrum;

// Value/gradient/Hessian at a point, expressed in a declared orthonormal
// frame of the tangent plane (sphere: east/north per tangent_frame; plane:
// the coordinate axes).
struct Jet2 {
  double value = 0.0;
  std::array<double, 2> grad = {0.0, 0.0};
  SymMatrix hess;
  int order = 0;
};

// One realization of an isotropic Gaussian field on the sphere: independent
// N(0, C_l) coefficients against real orthonormal spherical harmonics, so
// cov(X(p), X(q)) = sum_l (2l+1)/(4pi) C_l P_l(cos theta).
//
// Evaluation runs fully-normalized associated-Legendre recurrences on
// Q_lm(z) = Pbar_lm(z)/sin^m(theta) (a polynomial in z) against
// Re/Im[(x+iy)^m], which extends every harmonic to an ambient polynomial.
// That keeps value and ambient derivatives exact and pole-free; only the
// frame choice degenerates at the poles (see tangent_frame).
class SphericalFieldSample {
 public:
  const PowerSpectrum& spectrum() const { return spectrum_; }
  double r2() const { return r2_; }  // -K''(0)
  double a2() const { return a2_; }  // K''''(0)
  int max_l() const { return lmax_; }
  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_; }

  // a_{l,m}; m in [-l, l].
  double coeff(int l, int m) const;
  double& coeff_ref(int l, int m);

  // Jets in the unit-sphere chart (radius-1 round metric).
  Jet2 eval(const Vec3& p, int order) const;
  double value(const Vec3& p) const { return eval(p, 0).value; }

  friend SphericalFieldSample synth_sphere(const PowerSpectrum&, RngStream&,
                                           bool);

 private:
  PowerSpectrum spectrum_{{{1, 1.0}}};
  std::vector<std::vector<double>> coeffs_;  // per entry, size 2l+1, index m+l
  std::vector<int> entry_of_l_;              // lmax+1 lookup, -1 when absent
  int lmax_ = 0;
  double r2_ = 0.0, a2_ = 0.0;
  std::uint64_t seed_ = 0, stream_ = 0;
};

// Draws the coefficients; rescales the spectrum to unit variance (K0 = 1)
// first unless normalize is false.
SphericalFieldSample synth_sphere(const PowerSpectrum& spec, RngStream& rng,
                                  bool normalize = true);

// Rescale a unit-sphere jet to the radius-r sphere carrying the normal
// metric: gradients divide by r, Hessians by r^2.
Jet2 jet_on_radius_sphere(const Jet2& unit_jet, double r2);

enum class PlanarKind { berry, bargmann_fock };

// Stationary plane fields used by the covariance catalog:
//  - berry: sqrt(2/N) sum_j cos(sqrt2 u_j . x + theta_j), u_j uniform on the
//    circle; covariance -> J0(sqrt2 |x-y|) with O(N^{-1/2}) error, and every
//    realization satisfies Delta xi = -2 xi identically.
//  - bargmann_fock: e^{-|x|^2/2} sum a_ij x^i y^j / sqrt(i! j!) truncated at
//    total degree D chosen so the covariance error on the working window is
//    below 1e-10; covariance e^{-|x-y|^2/2}.
class PlanarFieldSample {
 public:
  PlanarKind kind() const { return kind_; }
  int wave_count() const { return static_cast<int>(dir_x_.size()); }
  int degree() const { return degree_; }
  double window() const { return window_; }
  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_; }

  Jet2 eval(double x, double y, int order) const;
  double value(double x, double y) const { return eval(x, y, 0).value; }

  friend PlanarFieldSample synth_planar(PlanarKind, int, RngStream&, double);

 private:
  PlanarKind kind_ = PlanarKind::berry;
  std::vector<double> dir_x_, dir_y_, phase_;
  std::vector<double> coeff_;  // packed a_ij / sqrt(i! j!), i+j <= degree
  int degree_ = 0;
  double window_ = 0.0;
  std::uint64_t seed_ = 0, stream_ = 0;
};

// n is the wave count for berry (>= 64) and ignored for bargmann_fock,
// whose truncation degree comes from the window bound.
PlanarFieldSample synth_planar(PlanarKind kind, int n, RngStream& rng,
                               double window = 2.5);

// Chi field f_k = sqrt(X_1^2 + ... + X_k^2) plus its smooth square
// F = |Y|^2 / 2 and the auxiliary phi(p, u) = Y(p)^T u.
template <typename Sample>
class ChiField {
 public:
  explicit ChiField(std::vector<Sample> components);

  int k() const { return static_cast<int>(components_.size()); }
  const std::vector<Sample>& components() const { return components_; }

  template <typename... Args>
  double F(Args... at) const {
    double s = 0.0;
    for (const Sample& c : components_) {
      double v = c.value(at...);
      s += v * v;
    }
    return 0.5 * s;
  }

  template <typename... Args>
  double f(Args... at) const {
    return std::sqrt(2.0 * F(at...));
  }

  template <typename... Args>
  double phi(std::span<const double> u, Args... at) const;

  // Jets of F: grad F = sum v_i g_i, Hess F = sum (g_i g_i^T + v_i H_i).
  template <typename... Args>
  Jet2 jet_F(int order, Args... at) const;

  // Jets of f_k by the chain rule; refuses |Y| < 1e-12 (nodal proximity).
  template <typename... Args>
  Jet2 jet_f(int order, Args... at) const;

 private:
  std::vector<Sample> components_;
};

using SphericalChiField = ChiField<SphericalFieldSample>;
using PlanarChiField = ChiField<PlanarFieldSample>;

// Validates that the components share a model (same spectrum / same kind).
SphericalChiField assemble_chi(std::vector<SphericalFieldSample> components);
PlanarChiField assemble_chi(std::vector<PlanarFieldSample> components);

// Centered finite-difference jets along exact geodesics (sphere) or axes
// (plane); the cross-check oracle for the analytic derivatives.
template <typename F>
Jet2 fd_jet_sphere(F&& field_value, const Vec3& p, double h);
template <typename F>
Jet2 fd_jet_planar(F&& field_value, double x, double y, double h);

}  // namespace chirf::fieldsim

#include "chirf/fieldsim_impl.hpp"

#endif
