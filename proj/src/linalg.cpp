#include "chirf/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace chirf {

SymMatrix& SymMatrix::operator+=(const SymMatrix& o) {
  if (o.dim_ != dim_) throw std::invalid_argument("SymMatrix: dim mismatch");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
  return *this;
}

SymMatrix SymMatrix::scaled(double s) const {
  SymMatrix r = *this;
  for (double& v : r.data_) v *= s;
  return r;
}

double sym_det(const SymMatrix& a) {
  const int n = a.dim();
  if (n == 1) return a(0, 0);
  if (n == 2) return a(0, 0) * a(1, 1) - a(0, 1) * a(0, 1);
  if (n == 3) {
    double a00 = a(0, 0), a01 = a(0, 1), a02 = a(0, 2);
    double a11 = a(1, 1), a12 = a(1, 2), a22 = a(2, 2);
    return a00 * (a11 * a22 - a12 * a12) - a01 * (a01 * a22 - a12 * a02) +
           a02 * (a01 * a12 - a11 * a02);
  }
  // LU with partial pivoting on a dense copy.
  std::vector<double> m(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m[i * n + j] = a(i, j);
  double det = 1.0;
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(m[r * n + col]) > std::abs(m[piv * n + col])) piv = r;
    if (piv != col) {
      for (int j = 0; j < n; ++j) std::swap(m[col * n + j], m[piv * n + j]);
      det = -det;
    }
    double d = m[col * n + col];
    if (d == 0.0) return 0.0;
    det *= d;
    for (int r = col + 1; r < n; ++r) {
      double f = m[r * n + col] / d;
      for (int j = col; j < n; ++j) m[r * n + j] -= f * m[col * n + j];
    }
  }
  return det;
}

bool sym_is_positive_definite(const SymMatrix& a, double rel_tol) {
  const int n = a.dim();
  const double tol = rel_tol * std::max(a.max_abs(), 1e-300);
  std::vector<double> m(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m[i * n + j] = a(i, j);
  std::vector<int> perm(n);
  for (int i = 0; i < n; ++i) perm[i] = i;
  for (int step = 0; step < n; ++step) {
    // pick the largest remaining diagonal as pivot
    int piv = step;
    for (int r = step + 1; r < n; ++r)
      if (m[r * n + r] > m[piv * n + piv]) piv = r;
    if (piv != step) {
      for (int j = 0; j < n; ++j) std::swap(m[step * n + j], m[piv * n + j]);
      for (int i = 0; i < n; ++i) std::swap(m[i * n + step], m[i * n + piv]);
    }
    double d = m[step * n + step];
    if (!(d > tol)) return false;
    for (int r = step + 1; r < n; ++r) {
      double f = m[r * n + step] / d;
      for (int j = step; j < n; ++j) m[r * n + j] -= f * m[step * n + j];
      m[r * n + step] = 0.0;
    }
  }
  return true;
}

std::array<double, 2> eig2x2(double a11, double a12, double a22) {
  double tr = a11 + a22;
  double diff = a11 - a22;
  double disc = std::sqrt(diff * diff + 4.0 * a12 * a12);
  return {0.5 * (tr - disc), 0.5 * (tr + disc)};
}

std::vector<double> cholesky_psd(const std::vector<double>& dense, int n,
                                 double rel_tol) {
  if (dense.size() != static_cast<std::size_t>(n) * n)
    throw std::invalid_argument("cholesky_psd: size mismatch");
  double scale = 0.0;
  for (double v : dense) scale = std::max(scale, std::abs(v));
  const double tol = rel_tol * std::max(scale, 1e-300);
  std::vector<double> l(static_cast<std::size_t>(n) * n, 0.0);
  for (int j = 0; j < n; ++j) {
    double d = dense[j * n + j];
    for (int k = 0; k < j; ++k) d -= l[j * n + k] * l[j * n + k];
    if (d < -tol)
      throw std::invalid_argument("cholesky_psd: matrix is not PSD");
    if (d <= tol) {
      // semidefinite direction: zero column, but the off-diagonals must
      // vanish too or the matrix was indefinite
      for (int i = j + 1; i < n; ++i) {
        double s = dense[i * n + j];
        for (int k = 0; k < j; ++k) s -= l[i * n + k] * l[j * n + k];
        if (std::abs(s) > 1e6 * tol)
          throw std::invalid_argument("cholesky_psd: matrix is not PSD");
      }
      continue;
    }
    double root = std::sqrt(d);
    l[j * n + j] = root;
    for (int i = j + 1; i < n; ++i) {
      double s = dense[i * n + j];
      for (int k = 0; k < j; ++k) s -= l[i * n + k] * l[j * n + k];
      l[i * n + j] = s / root;
    }
  }
  return l;
}

}  // namespace chirf
