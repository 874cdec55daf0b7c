#include "chirf/ensembles.hpp"

#include <cmath>
#include <stdexcept>

#include "chirf/mc.hpp"

namespace chirf::ensembles {

double sample_chi(int k, RngStream& rng) { return sample_chi_variable(k, rng); }

SymMatrix sample_wishart(int k, int m, RngStream& rng) {
  if (k < 0 || m < 1)
    throw std::invalid_argument("sample_wishart: need k >= 0, m >= 1");
  SymMatrix a(m);
  if (k == 0) return a;
  std::vector<double> g(static_cast<std::size_t>(m) * k);
  for (double& v : g) v = rng.normal();
  for (int i = 0; i < m; ++i)
    for (int j = i; j < m; ++j) {
      double s = 0.0;
      for (int q = 0; q < k; ++q) s += g[i * k + q] * g[j * k + q];
      a.at(i, j) = s;
    }
  return a;
}

HessianDraw sample_hessian_like_2d(const HessianModel2D& model,
                                   RngStream& rng) {
  if (!model.hessian_like())
    throw std::invalid_argument(
        "sample_hessian_like_2d: model has sigma^2 + c < 1");
  const double diag = 2.0 * model.sigma2 + model.c;
  const double l11 = std::sqrt(diag);
  const double l21 = model.c / l11;
  const double l22 = std::sqrt(std::max(diag - l21 * l21, 0.0));
  double z1 = rng.normal();
  double z2 = rng.normal();
  double h1 = l11 * z1;
  double h3 = l21 * z1 + l22 * z2;
  double h2 = std::sqrt(model.sigma2) * rng.normal();

  double gamma = -(h1 + h3) * model.gamma_trace_coeff();
  double noise = model.gamma_noise_coeff();
  // sigma^2 + c = 1 is the exact deterministic branch
  if (std::abs(model.sigma2 + model.c - 1.0) > 1e-12 && noise > 0.0)
    gamma += noise * rng.normal();

  HessianDraw d;
  d.h = SymMatrix(2);
  d.h.at(0, 0) = h1;
  d.h.at(0, 1) = h2;
  d.h.at(1, 1) = h3;
  d.gamma = gamma;
  return d;
}

namespace {

SymMatrix bordered(const SymMatrix& h, int k, double gamma,
                   std::span<const double> border) {
  const int m = h.dim();
  const int n = m + k - 1;
  SymMatrix out(n);
  for (int i = 0; i < m; ++i)
    for (int j = i; j < m; ++j) out.at(i, j) = h(i, j);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < k - 1; ++j) out.at(i, m + j) = border[i * (k - 1) + j];
  for (int j = 0; j < k - 1; ++j) out.at(m + j, m + j) = -gamma;
  return out;
}

}  // namespace

SymMatrix assemble_tilde_h(const HessianDraw& draw, int k, RngStream& rng) {
  if (k < 2) throw std::invalid_argument("assemble_tilde_h: k must be >= 2");
  const int m = draw.h.dim();
  std::vector<double> border(static_cast<std::size_t>(m) * (k - 1));
  for (double& v : border) v = rng.normal();
  return bordered(draw.h, k, draw.gamma, border);
}

SymMatrix assemble_tilde_h(const HessianDraw& draw, int k,
                           std::span<const double> border) {
  if (k < 2) throw std::invalid_argument("assemble_tilde_h: k must be >= 2");
  const int m = draw.h.dim();
  if (border.size() != static_cast<std::size_t>(m) * (k - 1))
    throw std::invalid_argument("assemble_tilde_h: border size mismatch");
  return bordered(draw.h, k, draw.gamma, border);
}

GaussianHessianLaw GaussianHessianLaw::from_covariance(
    std::vector<double> dense, int m) {
  const int d = m * (m + 1) / 2 + 1;
  if (dense.size() != static_cast<std::size_t>(d) * d)
    throw std::invalid_argument("GaussianHessianLaw: covariance size mismatch");
  if (std::abs(dense[static_cast<std::size_t>(d) * d - 1] - 1.0) > 1e-9)
    throw std::invalid_argument("GaussianHessianLaw: var(gamma) must be 1");
  GaussianHessianLaw law;
  law.m_ = m;
  law.d_ = d;
  law.chol_ = cholesky_psd(dense, d);
  // conditional on gamma: mean coefficient = cov(vec H, gamma), covariance
  // = Sigma_HH - c c^T
  const int h = d - 1;
  law.cond_mean_.resize(h);
  for (int i = 0; i < h; ++i) law.cond_mean_[i] = dense[i * d + (d - 1)];
  std::vector<double> cc(static_cast<std::size_t>(h) * h);
  for (int i = 0; i < h; ++i)
    for (int j = 0; j < h; ++j)
      cc[i * h + j] = dense[i * d + j] - law.cond_mean_[i] * law.cond_mean_[j];
  law.cond_chol_ = cholesky_psd(cc, h);
  return law;
}

GaussianHessianLaw GaussianHessianLaw::from_model(const HessianModel2D& mo) {
  if (!mo.hessian_like())
    throw std::invalid_argument(
        "GaussianHessianLaw: model has sigma^2 + c < 1");
  // order (h1, h2, h3, gamma)
  const double diag = 2.0 * mo.sigma2 + mo.c;
  std::vector<double> cov = {
      diag,       0.0,        mo.c, -1.0,  //
      0.0,        mo.sigma2,  0.0,  0.0,   //
      mo.c,       0.0,        diag, -1.0,  //
      -1.0,       0.0,        -1.0, 1.0,
  };
  return from_covariance(std::move(cov), 2);
}

HessianDraw GaussianHessianLaw::sample(RngStream& rng) const {
  std::vector<double> z(d_);
  for (double& v : z) v = rng.normal();
  std::vector<double> x(d_, 0.0);
  for (int i = 0; i < d_; ++i) {
    double s = 0.0;
    for (int j = 0; j <= i; ++j) s += chol_[i * d_ + j] * z[j];
    x[i] = s;
  }
  HessianDraw out;
  out.h = SymMatrix(m_);
  int idx = 0;
  for (int i = 0; i < m_; ++i)
    for (int j = i; j < m_; ++j) out.h.at(i, j) = x[idx++];
  out.gamma = x[d_ - 1];
  return out;
}

SymMatrix GaussianHessianLaw::sample_given_gamma(double g,
                                                 RngStream& rng) const {
  const int h = d_ - 1;
  std::vector<double> z(h);
  for (double& v : z) v = rng.normal();
  SymMatrix out(m_);
  int idx = 0;
  for (int i = 0; i < m_; ++i)
    for (int j = i; j < m_; ++j) {
      double s = cond_mean_[idx] * g;
      for (int q = 0; q <= idx; ++q) s += cond_chol_[idx * h + q] * z[q];
      out.at(i, j) = s;
      ++idx;
    }
  return out;
}

HessianLikeCheck validate_hessian_like(const GaussianHessianLaw& law,
                                       std::int64_t n, RngStream& rng) {
  const int m = law.m();
  std::vector<Welford> acc(static_cast<std::size_t>(m) * m);
  for (std::int64_t i = 0; i < n; ++i) {
    HessianDraw d = law.sample(rng);
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b)
        acc[a * m + b].add(d.h(a, b) * d.gamma);
  }
  HessianLikeCheck out;
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) {
      MCEstimate e = acc[a * m + b].estimate(0);
      double target = (a == b) ? -1.0 : 0.0;
      double dev = std::abs(e.value - target);
      out.max_abs_deviation = std::max(out.max_abs_deviation, dev);
      if (e.std_error > 0.0)
        out.max_z = std::max(out.max_z, dev / e.std_error);
    }
  return out;
}

}  // namespace chirf::ensembles
