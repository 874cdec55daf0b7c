#include "chirf/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace chirf::analytic {

PowerSpectrum::PowerSpectrum(std::vector<std::pair<int, double>> entries)
    : entries_(std::move(entries)) {
  if (entries_.empty())
    throw std::invalid_argument("PowerSpectrum: no entries");
  std::sort(entries_.begin(), entries_.end());
  bool has_wave = false;
  int prev_l = -1;
  for (const auto& [l, c] : entries_) {
    if (l < 0) throw std::invalid_argument("PowerSpectrum: l must be >= 0");
    if (l == prev_l)
      throw std::invalid_argument("PowerSpectrum: duplicate multipole");
    prev_l = l;
    if (c < 0.0) throw std::invalid_argument("PowerSpectrum: C_l must be >= 0");
    if (l >= 1 && c > 0.0) has_wave = true;
  }
  if (!has_wave)
    throw std::invalid_argument(
        "PowerSpectrum: needs some C_l > 0 with l >= 1");
}

PowerSpectrum PowerSpectrum::single_l(int l, double c_l) {
  return PowerSpectrum({{l, c_l}});
}

int PowerSpectrum::max_l() const {
  int m = 0;
  for (const auto& [l, c] : entries_)
    if (c > 0.0) m = std::max(m, l);
  return m;
}

PowerSpectrum PowerSpectrum::normalized() const {
  double k0 = spectral_moments(*this).k0;
  auto scaled = entries_;
  for (auto& [l, c] : scaled) c /= k0;
  return PowerSpectrum(scaled);
}

SpectralMoments spectral_moments(const PowerSpectrum& spec) {
  SpectralMoments m;
  for (const auto& [l, c] : spec.entries()) {
    double w = (2.0 * l + 1.0) / (4.0 * kPi) * c;
    double lam = static_cast<double>(l) * (l + 1);
    m.k0 += w;
    m.k2 -= w * 0.5 * lam;
    m.k4 += w * (3.0 * lam * (lam - 2.0) / 8.0 + 0.5 * lam);
  }
  return m;
}

HessianModel2D planar_hessian_model(double k4) {
  if (!(k4 > 0.0))
    throw std::invalid_argument("planar_hessian_model: K'''' must be > 0");
  return HessianModel2D{k4 / 3.0, k4 / 3.0};
}

SphericalHessianModel spherical_hessian_model(const PowerSpectrum& spec,
                                              SignVariant variant) {
  PowerSpectrum unit = spec.normalized();
  SpectralMoments m = spectral_moments(unit);
  double r2 = -m.k2;
  double a2 = m.k4;
  if (!(r2 > 0.0))
    throw std::invalid_argument("spherical_hessian_model: -K''(0) must be > 0");
  if (a2 < r2)
    throw std::invalid_argument(
        "spherical_hessian_model: K''''(0) < -K''(0), invalid spectrum");
  double r4 = r2 * r2;
  SphericalHessianModel out;
  out.r2 = r2;
  out.a2 = a2;
  if (variant == SignVariant::corrected) {
    out.model.c = (a2 + 2.0 * r2) / (3.0 * r4);
    out.model.sigma2 = (a2 - r2) / (3.0 * r4);
  } else {
    // covariance matrix as printed: cov(h1,h3) = (a^2 - 2)/(3 r^4),
    // var(h2) = (a^2 + 1)/(3 r^4)
    out.model.c = (a2 - 2.0) / (3.0 * r4);
    out.model.sigma2 = (a2 + 1.0) / (3.0 * r4);
  }
  return out;
}

double ec_density_a1(double t, const HessianModel2D& model) {
  return (hermite(2, t) + (model.c - model.sigma2)) * gaussian_density(t);
}

double maxima_density_sphere(double r, double t, SignVariant variant) {
  if (!(r > 0.0))
    throw std::invalid_argument("maxima_density_sphere: r must be > 0");
  double sign = (variant == SignVariant::corrected) ? 1.0 : -1.0;
  return (2.0 * r * r * hermite(2, t) + sign * 2.0) * kSqrtTwoPi *
         gaussian_density(t);
}

ProductLK lk_sphere_circle(double r) {
  if (!(r > 0.0))
    throw std::invalid_argument("lk_sphere_circle: r must be > 0");
  // L_j(M x N) = sum_i L_i(M) L_{j-i}(N)
  const double lk_circle[2] = {0.0, kTwoPi};
  const double lk_sphere[3] = {2.0, 0.0, 4.0 * kPi * r * r};
  ProductLK out;
  out.radius = r;
  out.curvatures.assign(4, 0.0);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 2; ++j) out.curvatures[i + j] += lk_sphere[i] * lk_circle[j];
  return out;
}

double ec_sum_product(const ProductLK& lk, double t) {
  double sum = 0.0;
  for (std::size_t j = 0; j < lk.curvatures.size(); ++j) {
    if (lk.curvatures[j] == 0.0) continue;
    sum += lk.curvatures[j] * std::pow(kTwoPi, -0.5 * static_cast<double>(j)) *
           hermite_weighted(static_cast<int>(j) - 1, t);
  }
  return sum;
}

double expected_nodal_volume(int k, int m, double manifold_volume) {
  if (k < 1 || m < 1 || k > m)
    throw std::invalid_argument("expected_nodal_volume: requires 1 <= k <= m");
  return sphere_surface_volume(m - k) / sphere_surface_volume(m) *
         manifold_volume;
}

}  // namespace chirf::analytic
