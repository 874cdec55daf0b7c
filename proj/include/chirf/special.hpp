#ifndef CHIRF_SPECIAL_HPP
#define CHIRF_SPECIAL_HPP

namespace chirf {

inline constexpr double kPi = 3.14159265358979323846264338327950288;
inline constexpr double kTwoPi = 2.0 * kPi;
inline constexpr double kSqrtTwoPi = 2.50662827463100050241576528481;

// Standard Gaussian density.
double gaussian_density(double t);

// Upper tail Psi(t) = P(N(0,1) >= t).
double gaussian_upper_tail(double t);

// Lower-tail quantile of the standard normal (Wichura AS 241, accurate to
// ~1e-16 down to p near the double underflow threshold).
double normal_quantile(double p);

// Probabilists' Hermite polynomial H_n, H_0 = 1, H_1 = t,
// H_{n+1} = t H_n - n H_{n-1}.  Requires n >= 0.
double hermite(int n, double t);

// H_{-1}(t) := Psi(t) / phi(t), the Mills-type tail ratio that extends the
// Hermite family so the j = 0 term of the curvature sum is defined.
// Strictly positive and decreasing; ~1/t as t -> infinity.
double hermite_tail_ratio(double t);

// H_n(t) * phi(t) for n >= 0, and Psi(t) for n = -1.
double hermite_weighted(int n, double t);

// E[chi_k^a] = 2^{a/2} Gamma((k+a)/2) / Gamma(k/2).  Defined for k > -a;
// throws std::domain_error when the moment diverges.  Evaluated through
// log-Gamma so large k (a few hundred) stay finite.
double chi_moment(int k, double a);

// Gamma((k-m)/2) / (2^{m/2} Gamma(k/2)) = E[chi_k^{-m}], the constant in
// front of the critical-point count.  Requires k > m.
double inv_chi_constant(int k, int m);

// Regularized lower incomplete gamma P(a, x).
double regularized_gamma_p(double a, double x);

// CDF of the chi distribution with k degrees of freedom.
double chi_cdf(int k, double x);

// j-dimensional volume of the unit sphere S^j in R^{j+1}.
double sphere_surface_volume(int j);

// Legendre polynomial P_l and its first derivative.
double legendre_p(int l, double x);
double legendre_p_derivative(int l, double x);

}  // namespace chirf

#endif
