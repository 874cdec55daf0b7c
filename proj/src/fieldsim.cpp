#include "chirf/fieldsim.hpp"

#include <cmath>
#include <stdexcept>

namespace chirf::fieldsim {

double SphericalFieldSample::coeff(int l, int m) const {
  if (l < 0 || l > lmax_ || entry_of_l_[l] < 0 || std::abs(m) > l)
    throw std::out_of_range("SphericalFieldSample::coeff: no such (l, m)");
  return coeffs_[entry_of_l_[l]][m + l];
}

double& SphericalFieldSample::coeff_ref(int l, int m) {
  if (l < 0 || l > lmax_ || entry_of_l_[l] < 0 || std::abs(m) > l)
    throw std::out_of_range("SphericalFieldSample::coeff: no such (l, m)");
  return coeffs_[entry_of_l_[l]][m + l];
}

SphericalFieldSample synth_sphere(const PowerSpectrum& spec, RngStream& rng,
                                  bool normalize) {
  SphericalFieldSample s;
  s.spectrum_ = normalize ? spec.normalized() : spec;
  analytic::SpectralMoments mom = analytic::spectral_moments(s.spectrum_);
  s.r2_ = -mom.k2;
  s.a2_ = mom.k4;
  s.lmax_ = 0;
  for (const auto& [l, c] : s.spectrum_.entries()) s.lmax_ = std::max(s.lmax_, l);
  s.entry_of_l_.assign(s.lmax_ + 1, -1);
  s.seed_ = rng.seed();
  s.stream_ = rng.stream_id();
  int idx = 0;
  for (const auto& [l, c] : s.spectrum_.entries()) {
    s.entry_of_l_[l] = idx;
    std::vector<double> a(2 * l + 1);
    double sd = std::sqrt(c);
    for (double& v : a) v = sd * rng.normal();
    s.coeffs_.push_back(std::move(a));
    ++idx;
  }
  return s;
}

// Ambient polynomial evaluation: for each order m the recurrence
//   Q_{l,m} = alpha_lm z Q_{l-1,m} - beta_lm Q_{l-2,m}
// (the standard fully-normalized associated-Legendre recurrence, valid
// after dividing out sin^m theta) runs up in l together with its first two
// z-derivatives, while C_m + i S_m = (x + i y)^m supplies the sectoral
// factor and its (x, y)-derivatives.
Jet2 SphericalFieldSample::eval(const Vec3& p, int order) const {
  const double x = p[0], y = p[1], z = p[2];
  const int lmax = lmax_;

  // C_m, S_m for m = 0..lmax
  static thread_local std::vector<double> cm, sm;
  cm.assign(lmax + 1, 0.0);
  sm.assign(lmax + 1, 0.0);
  cm[0] = 1.0;
  for (int m = 1; m <= lmax; ++m) {
    cm[m] = x * cm[m - 1] - y * sm[m - 1];
    sm[m] = x * sm[m - 1] + y * cm[m - 1];
  }

  double f = 0.0;
  double fx = 0.0, fy = 0.0, fz = 0.0;
  double fxx = 0.0, fxy = 0.0, fyy = 0.0, fxz = 0.0, fyz = 0.0, fzz = 0.0;

  const double sqrt2 = std::sqrt(2.0);
  double q_sect = 1.0 / std::sqrt(4.0 * kPi);  // Q_{0,0}

  for (int m = 0; m <= lmax; ++m) {
    if (m > 0) q_sect *= -std::sqrt((2.0 * m + 1.0) / (2.0 * m));
    double q = q_sect, qp = 0.0, qpp = 0.0;  // Q_{m,m} and z-derivatives
    double qm1 = 0.0, qm1p = 0.0, qm1pp = 0.0;
    for (int l = m; l <= lmax; ++l) {
      if (l > m) {
        double ll = l, mm = m;
        double alpha = std::sqrt((2.0 * ll - 1.0) * (2.0 * ll + 1.0) /
                                 ((ll - mm) * (ll + mm)));
        double beta =
            (l - m >= 2)
                ? std::sqrt((2.0 * ll + 1.0) * (ll + mm - 1.0) *
                            (ll - mm - 1.0) /
                            ((ll - mm) * (ll + mm) * (2.0 * ll - 3.0)))
                : 0.0;
        double qn = alpha * z * q - beta * qm1;
        double qnp = alpha * (z * qp + q) - beta * qm1p;
        double qnpp = alpha * (z * qpp + 2.0 * qp) - beta * qm1pp;
        qm1 = q;
        qm1p = qp;
        qm1pp = qpp;
        q = qn;
        qp = qnp;
        qpp = qnpp;
      }
      if (entry_of_l_[l] < 0) continue;
      const std::vector<double>& a = coeffs_[entry_of_l_[l]];
      double ap = a[m + l];
      double am = (m > 0) ? a[-m + l] : 0.0;

      double tc, ts, g;
      if (m == 0) {
        tc = 1.0;
        ts = 0.0;
        g = ap;
      } else {
        tc = sqrt2 * cm[m];
        ts = sqrt2 * sm[m];
        g = ap * tc + am * ts;
      }
      f += q * g;
      if (order < 1) continue;

      double gx = 0.0, gy = 0.0;
      if (m > 0) {
        double dc = sqrt2 * m * cm[m - 1];
        double ds = sqrt2 * m * sm[m - 1];
        gx = ap * dc + am * ds;   // d/dx
        gy = -ap * ds + am * dc;  // d/dy
      }
      fx += q * gx;
      fy += q * gy;
      fz += qp * g;
      if (order < 2) continue;

      double gxx = 0.0, gxy = 0.0, gyy = 0.0;
      if (m > 1) {
        double c2 = sqrt2 * m * (m - 1) * cm[m - 2];
        double s2 = sqrt2 * m * (m - 1) * sm[m - 2];
        gxx = ap * c2 + am * s2;
        gxy = -ap * s2 + am * c2;
        gyy = -gxx;
      }
      fxx += q * gxx;
      fxy += q * gxy;
      fyy += q * gyy;
      fxz += qp * gx;
      fyz += qp * gy;
      fzz += qpp * g;
    }
  }

  Jet2 out;
  out.order = order;
  out.value = f;
  out.hess = SymMatrix(2);
  if (order < 1) return out;

  TangentFrame fr = tangent_frame(p);
  Vec3 grad_amb = {fx, fy, fz};
  double radial = dot(p, grad_amb);
  out.grad[0] = dot(fr.e1, grad_amb);
  out.grad[1] = dot(fr.e2, grad_amb);
  if (order < 2) return out;

  auto hess_amb = [&](const Vec3& u, const Vec3& v) {
    return u[0] * (fxx * v[0] + fxy * v[1] + fxz * v[2]) +
           u[1] * (fxy * v[0] + fyy * v[1] + fyz * v[2]) +
           u[2] * (fxz * v[0] + fyz * v[1] + fzz * v[2]);
  };
  // Riemannian Hessian of the restriction: H(u,v) = u^T D2 v - (p.grad) d_uv
  out.hess.at(0, 0) = hess_amb(fr.e1, fr.e1) - radial;
  out.hess.at(0, 1) = hess_amb(fr.e1, fr.e2);
  out.hess.at(1, 1) = hess_amb(fr.e2, fr.e2) - radial;
  return out;
}

Jet2 jet_on_radius_sphere(const Jet2& unit_jet, double r2) {
  if (!(r2 > 0.0))
    throw std::invalid_argument("jet_on_radius_sphere: r2 must be > 0");
  Jet2 out = unit_jet;
  double r = std::sqrt(r2);
  out.grad[0] /= r;
  out.grad[1] /= r;
  if (out.order >= 2) out.hess = unit_jet.hess.scaled(1.0 / r2);
  return out;
}

PlanarFieldSample synth_planar(PlanarKind kind, int n, RngStream& rng,
                               double window) {
  PlanarFieldSample s;
  s.kind_ = kind;
  s.window_ = window;
  s.seed_ = rng.seed();
  s.stream_ = rng.stream_id();
  if (kind == PlanarKind::berry) {
    if (n < 64) throw std::invalid_argument("synth_planar: berry needs N >= 64");
    s.dir_x_.resize(n);
    s.dir_y_.resize(n);
    s.phase_.resize(n);
    for (int j = 0; j < n; ++j) {
      double a = kTwoPi * rng.uniform();
      s.dir_x_[j] = std::cos(a);
      s.dir_y_[j] = std::sin(a);
      s.phase_[j] = kTwoPi * rng.uniform();
    }
  } else {
    if (!(window > 0.0))
      throw std::invalid_argument("synth_planar: window must be > 0");
    // smallest degree with e^{R^2} R^{2(D+1)} / (D+1)! < 1e-10 on the window
    double r2 = window * window;
    int degree = 4;
    double log_bound = r2 + (degree + 1) * std::log(r2) - std::lgamma(degree + 2.0);
    while (log_bound > std::log(1e-10) && degree < 400) {
      ++degree;
      log_bound = r2 + (degree + 1) * std::log(r2) - std::lgamma(degree + 2.0);
    }
    s.degree_ = degree;
    s.coeff_.resize(static_cast<std::size_t>(degree + 1) * (degree + 2) / 2);
    std::size_t idx = 0;
    for (int i = 0; i <= degree; ++i)
      for (int j = 0; j <= degree - i; ++j) {
        double scale =
            std::exp(-0.5 * (std::lgamma(i + 1.0) + std::lgamma(j + 1.0)));
        s.coeff_[idx++] = scale * rng.normal();
      }
  }
  return s;
}

Jet2 PlanarFieldSample::eval(double x, double y, int order) const {
  Jet2 out;
  out.order = order;
  out.hess = SymMatrix(2);
  if (kind_ == PlanarKind::berry) {
    const int n = wave_count();
    const double amp = std::sqrt(2.0 / n);
    const double w = std::sqrt(2.0);
    for (int j = 0; j < n; ++j) {
      double ux = dir_x_[j], uy = dir_y_[j];
      double arg = w * (ux * x + uy * y) + phase_[j];
      double c = std::cos(arg);
      out.value += amp * c;
      if (order >= 1) {
        double sn = std::sin(arg);
        out.grad[0] -= amp * w * ux * sn;
        out.grad[1] -= amp * w * uy * sn;
        if (order >= 2) {
          out.hess.at(0, 0) -= amp * 2.0 * ux * ux * c;
          out.hess.at(0, 1) -= amp * 2.0 * ux * uy * c;
          out.hess.at(1, 1) -= amp * 2.0 * uy * uy * c;
        }
      }
    }
    return out;
  }

  // bargmann_fock: f = e^{-(x^2+y^2)/2} g with polynomial g
  double g = 0.0, gx = 0.0, gy = 0.0, gxx = 0.0, gxy = 0.0, gyy = 0.0;
  static thread_local std::vector<double> xp, yp;
  xp.assign(degree_ + 1, 1.0);
  yp.assign(degree_ + 1, 1.0);
  for (int i = 1; i <= degree_; ++i) {
    xp[i] = xp[i - 1] * x;
    yp[i] = yp[i - 1] * y;
  }
  std::size_t idx = 0;
  for (int i = 0; i <= degree_; ++i)
    for (int j = 0; j <= degree_ - i; ++j) {
      double a = coeff_[idx++];
      if (a == 0.0) continue;
      g += a * xp[i] * yp[j];
      if (order >= 1) {
        if (i >= 1) gx += a * i * xp[i - 1] * yp[j];
        if (j >= 1) gy += a * j * xp[i] * yp[j - 1];
        if (order >= 2) {
          if (i >= 2) gxx += a * i * (i - 1) * xp[i - 2] * yp[j];
          if (i >= 1 && j >= 1) gxy += a * i * j * xp[i - 1] * yp[j - 1];
          if (j >= 2) gyy += a * j * (j - 1) * xp[i] * yp[j - 2];
        }
      }
    }
  double e = std::exp(-0.5 * (x * x + y * y));
  out.value = e * g;
  if (order >= 1) {
    out.grad[0] = e * (gx - x * g);
    out.grad[1] = e * (gy - y * g);
    if (order >= 2) {
      out.hess.at(0, 0) = e * (gxx - 2.0 * x * gx + (x * x - 1.0) * g);
      out.hess.at(0, 1) = e * (gxy - x * gy - y * gx + x * y * g);
      out.hess.at(1, 1) = e * (gyy - 2.0 * y * gy + (y * y - 1.0) * g);
    }
  }
  return out;
}

SphericalChiField assemble_chi(std::vector<SphericalFieldSample> components) {
  for (std::size_t i = 1; i < components.size(); ++i)
    if (components[i].spectrum().entries() !=
        components[0].spectrum().entries())
      throw std::invalid_argument("assemble_chi: components from different spectra");
  return SphericalChiField(std::move(components));
}

PlanarChiField assemble_chi(std::vector<PlanarFieldSample> components) {
  for (std::size_t i = 1; i < components.size(); ++i)
    if (components[i].kind() != components[0].kind())
      throw std::invalid_argument("assemble_chi: components of different kinds");
  return PlanarChiField(std::move(components));
}

}  // namespace chirf::fieldsim
