#ifndef CHIRF_LINALG_HPP
#define CHIRF_LINALG_HPP

#include <array>
#include <cstddef>
#include <vector>

namespace chirf {

// Dense symmetric matrix stored as the packed upper triangle, row-major:
// (0,0), (0,1), ..., (0,n-1), (1,1), ...
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(int dim)
      : dim_(dim), data_(static_cast<std::size_t>(dim) * (dim + 1) / 2, 0.0) {}

  int dim() const { return dim_; }

  double operator()(int i, int j) const { return data_[index(i, j)]; }
  double& at(int i, int j) { return data_[index(i, j)]; }

  const std::vector<double>& packed() const { return data_; }

  double trace() const {
    double t = 0.0;
    for (int i = 0; i < dim_; ++i) t += (*this)(i, i);
    return t;
  }

  double max_abs() const {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::abs(v));
    return m;
  }

  SymMatrix& operator+=(const SymMatrix& o);
  SymMatrix scaled(double s) const;

 private:
  std::size_t index(int i, int j) const {
    if (i > j) std::swap(i, j);
    // row i starts at offset i*dim - i(i-1)/2
    return static_cast<std::size_t>(i) * dim_ -
           static_cast<std::size_t>(i) * (i - 1) / 2 + (j - i);
  }

  int dim_ = 0;
  std::vector<double> data_;
};

// Determinant via LU with partial pivoting (valid for indefinite input).
double sym_det(const SymMatrix& a);

// Positive-definiteness by diagonally pivoted Cholesky: PD iff every pivot
// exceeds tol * max|entry|.  Boundary/indefinite cases report false.
bool sym_is_positive_definite(const SymMatrix& a, double rel_tol = 1e-10);

// Eigenvalues of a 2x2 symmetric matrix, ascending.
std::array<double, 2> eig2x2(double a11, double a12, double a22);

// Lower Cholesky factor of a symmetric PSD matrix given as dense rows;
// semidefinite directions get a zero column (used to build samplers from
// user-supplied covariances).  Throws if the matrix is indefinite beyond
// tolerance.
std::vector<double> cholesky_psd(const std::vector<double>& dense, int n,
                                 double rel_tol = 1e-10);

}  // namespace chirf

#endif
