#ifndef CHIRF_CRITCOUNT_HPP
#define CHIRF_CRITCOUNT_HPP

#include <optional>
#include <vector>

#include "chirf/fieldsim.hpp"
#include "chirf/mc.hpp"
#include "chirf/sphere_grid.hpp"

namespace chirf::critcount {

using fieldsim::PlanarChiField;
using fieldsim::PlanarKind;
using fieldsim::SphericalChiField;

struct CriticalPoint {
  Vec3 location = {0, 0, 0};  // unit sphere; planar points use (x, y, 0)
  double value = 0.0;         // f_k
  double grad_norm = 0.0;     // |grad F| at convergence (chart units)
  std::array<double, 2> hess_eigs = {0.0, 0.0};  // of Hess f_k, ascending
  int index = 0;              // negative eigenvalues, in [0, 2]
  bool degenerate = false;    // some |eig| < degeneracy tolerance
};

struct FindOptions {
  double newton_tol = 1e-10;
  int max_newton_iter = 50;
  double merge_distance = 1e-6;
  double degeneracy_tol = 1e-8;
};

// Locate the critical points of f_k with value >= t_min (t_min > 0: the
// nodal set itself is excluded).  Seeds come from grid cells where a
// tangent-frame gradient component changes sign or the norm is locally
// small; each seed is refined by damped Newton on grad F with geodesic
// retraction, duplicates merged, and survivors classified by the
// eigenvalues of the f_k Hessian on the radius-r sphere (r^2 = -K''(0)).
std::vector<CriticalPoint> find_critical_points(const SphericalChiField& field,
                                                double t_min,
                                                const IcoSphere& grid,
                                                const FindOptions& opt = {});
// Convenience overload; depth < 0 picks the default resolution for the
// field band limit.
std::vector<CriticalPoint> find_critical_points(const SphericalChiField& field,
                                                double t_min, int depth = -1,
                                                const FindOptions& opt = {});

// Critical points of f_k on the planar window [-half_width, half_width]^2
// with an n x n seeding lattice.
std::vector<CriticalPoint> find_critical_points_planar(
    const PlanarChiField& field, double t_min, double half_width, int grid_n,
    const FindOptions& opt = {});

// Number of index-2 (local maximum) points with value >= t.  Degenerate
// points are never counted.
int count_maxima_above(const std::vector<CriticalPoint>& points, double t);

// sum of (-1)^index over critical points with value >= t; equals the Euler
// characteristic of the excursion set for Morse realizations.  Throws if a
// degenerate point sits above the threshold.
int signed_euler_count(const std::vector<CriticalPoint>& points, double t);

// Independent check of signed_euler_count: V - E + F of the sub-complex of
// grid simplices whose vertices all satisfy f_k >= t.
int pixel_euler_characteristic(const SphericalChiField& field, double t,
                               const IcoSphere& grid);

// What the covariance oracle measures from.
struct OracleSource {
  enum class Kind { sphere, berry, bargmann_fock };
  Kind kind = Kind::sphere;
  std::optional<analytic::PowerSpectrum> spectrum;  // sphere only
  int berry_waves = 4096;
  double bf_window = 2.0;

  static OracleSource sphere(analytic::PowerSpectrum spec);
  static OracleSource berry(int waves = 4096);
  static OracleSource bargmann_fock(double window = 2.0);
};

// Empirical second-derivative covariances at a fixed point and frame, the
// instrument that settles the sign question in the spherical Hessian
// catalog.  Sphere sources are measured on the radius-r sphere that makes
// the field normal; gamma is the field value at the point.
struct CovarianceOracleReport {
  MCEstimate var_h1;        // E[h1^2]
  MCEstimate cov_h13;       // E[h1 h3]
  MCEstimate var_h2;        // E[h2^2]
  MCEstimate e_h1_gamma;    // E[h1 gamma], -1 for a normal field
  MCEstimate c_minus_sigma2;  // mean of (3 h1 h3 - h1^2)/2
  double implied_sigma2 = 0.0;
  double implied_c = 0.0;
  double implied_c_minus_sigma2 = 0.0;
  double r2 = 1.0;
  double fd_max_error = 0.0;  // analytic vs finite-difference jets
};

CovarianceOracleReport hessian_covariance_oracle(const OracleSource& source,
                                                 std::int64_t n_realizations,
                                                 const RngStream& rng);

}  // namespace chirf::critcount

#endif
