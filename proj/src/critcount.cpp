#include "chirf/critcount.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace chirf::critcount {

namespace {

using fieldsim::Jet2;

struct NewtonOutcome {
  bool converged = false;
  Vec3 p = {0, 0, 0};
  double grad_norm = 0.0;
};

NewtonOutcome newton_sphere(const SphericalChiField& field, const Vec3& seed,
                            const FindOptions& opt) {
  Vec3 p = seed;
  Jet2 j = field.jet_F(2, p);
  double gn = std::hypot(j.grad[0], j.grad[1]);
  for (int iter = 0; iter < opt.max_newton_iter; ++iter) {
    if (gn < opt.newton_tol) return {true, p, gn};
    double h11 = j.hess(0, 0), h12 = j.hess(0, 1), h22 = j.hess(1, 1);
    double det = h11 * h22 - h12 * h12;
    double scale = std::max({std::abs(h11), std::abs(h12), std::abs(h22)});
    if (std::abs(det) < 1e-14 * std::max(scale * scale, 1e-30)) return {};
    double d1 = (-j.grad[0] * h22 + j.grad[1] * h12) / det;
    double d2 = (-h11 * j.grad[1] + h12 * j.grad[0]) / det;
    TangentFrame fr = tangent_frame(p);
    bool accepted = false;
    double step = 1.0;
    for (int halving = 0; halving < 25; ++halving) {
      Vec3 cand = normalized(
          p + (step * d1) * fr.e1 + (step * d2) * fr.e2);
      Jet2 jc = field.jet_F(2, cand);
      double gc = std::hypot(jc.grad[0], jc.grad[1]);
      if (gc <= (1.0 - 1e-4 * step) * gn) {
        p = cand;
        j = jc;
        gn = gc;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) return {};
  }
  return {gn < opt.newton_tol, p, gn};
}

CriticalPoint classify_sphere(const SphericalChiField& field, const Vec3& p,
                              double grad_norm, double r2,
                              const FindOptions& opt) {
  Jet2 jf = field.jet_f(2, p);
  Jet2 jr = fieldsim::jet_on_radius_sphere(jf, r2);
  auto eig = eig2x2(jr.hess(0, 0), jr.hess(0, 1), jr.hess(1, 1));
  CriticalPoint cp;
  cp.location = p;
  cp.value = jf.value;
  cp.grad_norm = grad_norm;
  cp.hess_eigs = eig;
  cp.index = (eig[0] < 0.0) + (eig[1] < 0.0);
  cp.degenerate = std::min(std::abs(eig[0]), std::abs(eig[1])) <
                  opt.degeneracy_tol;
  return cp;
}

template <typename DistanceFn>
std::vector<CriticalPoint> merge_points(std::vector<CriticalPoint> pts,
                                        double radius, DistanceFn distance) {
  // keep the representative with the smallest residual gradient
  std::sort(pts.begin(), pts.end(),
            [](const CriticalPoint& a, const CriticalPoint& b) {
              return a.grad_norm < b.grad_norm;
            });
  std::vector<CriticalPoint> out;
  for (const CriticalPoint& c : pts) {
    bool dup = false;
    for (const CriticalPoint& k : out)
      if (distance(c.location, k.location) < radius) {
        dup = true;
        break;
      }
    if (!dup) out.push_back(c);
  }
  std::sort(out.begin(), out.end(),
            [](const CriticalPoint& a, const CriticalPoint& b) {
              return a.location < b.location;
            });
  return out;
}

double median_of(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::nth_element(v.begin(), v.begin() + v.size() / 2, v.end());
  return v[v.size() / 2];
}

// centered stencils at h and h/2 combined to 4th order; large wave sums
// make the plain h = 1e-4 stencil roundoff-limited
template <typename FdAt>
double jet_discrepancy(const Jet2& analytic_jet, FdAt&& fd_at, double h) {
  Jet2 a = fd_at(h);
  Jet2 b = fd_at(0.5 * h);
  auto rich = [](double coarse, double fine) {
    return (4.0 * fine - coarse) / 3.0;
  };
  return std::max(
      {std::abs(analytic_jet.value - b.value),
       std::abs(analytic_jet.grad[0] - rich(a.grad[0], b.grad[0])),
       std::abs(analytic_jet.grad[1] - rich(a.grad[1], b.grad[1])),
       std::abs(analytic_jet.hess(0, 0) - rich(a.hess(0, 0), b.hess(0, 0))),
       std::abs(analytic_jet.hess(0, 1) - rich(a.hess(0, 1), b.hess(0, 1))),
       std::abs(analytic_jet.hess(1, 1) - rich(a.hess(1, 1), b.hess(1, 1)))});
}

}  // namespace

std::vector<CriticalPoint> find_critical_points(const SphericalChiField& field,
                                                double t_min,
                                                const IcoSphere& grid,
                                                const FindOptions& opt) {
  if (!(t_min > 0.0))
    throw std::invalid_argument(
        "find_critical_points: t_min must be > 0 (the nodal set is excluded)");
  const double r2 = field.components()[0].r2();
  const std::size_t nv = grid.vertices.size();

  std::vector<Vec3> grad_amb(nv);
  std::vector<double> gnorm(nv);
  for (std::size_t i = 0; i < nv; ++i) {
    Jet2 j = field.jet_F(1, grid.vertices[i]);
    TangentFrame fr = tangent_frame(grid.vertices[i]);
    grad_amb[i] = j.grad[0] * fr.e1 + j.grad[1] * fr.e2;
    gnorm[i] = std::hypot(j.grad[0], j.grad[1]);
  }
  const double small_norm = 0.1 * median_of(gnorm);

  std::vector<Vec3> seeds;
  for (const auto& f : grid.faces) {
    const Vec3& p0 = grid.vertices[f[0]];
    const Vec3& p1 = grid.vertices[f[1]];
    const Vec3& p2 = grid.vertices[f[2]];
    Vec3 n = normalized(p0 + p1 + p2);
    Vec3 u = p1 - p0;
    u = normalized(u - dot(u, n) * n);
    Vec3 v = cross(n, u);
    double a[3], b[3];
    double min_norm = 1e300;
    for (int c = 0; c < 3; ++c) {
      a[c] = dot(grad_amb[f[c]], u);
      b[c] = dot(grad_amb[f[c]], v);
      min_norm = std::min(min_norm, gnorm[f[c]]);
    }
    auto sign_change = [](const double* w) {
      return !(w[0] > 0 && w[1] > 0 && w[2] > 0) &&
             !(w[0] < 0 && w[1] < 0 && w[2] < 0);
    };
    if (sign_change(a) || sign_change(b) || min_norm < small_norm)
      seeds.push_back(n);
  }
  auto nbrs = grid.neighbors();
  for (std::size_t i = 0; i < nv; ++i) {
    bool is_min = true;
    for (int j : nbrs[i])
      if (gnorm[j] < gnorm[i]) {
        is_min = false;
        break;
      }
    if (is_min) seeds.push_back(grid.vertices[i]);
  }

  const double f_min = 0.5 * t_min * t_min;  // threshold on F
  std::vector<CriticalPoint> found;
  for (const Vec3& s : seeds) {
    NewtonOutcome res = newton_sphere(field, s, opt);
    if (!res.converged) continue;
    if (field.F(res.p) < f_min) continue;
    found.push_back(classify_sphere(field, res.p, res.grad_norm, r2, opt));
  }
  return merge_points(std::move(found), opt.merge_distance,
                      [](const Vec3& a, const Vec3& b) {
                        return geodesic_distance(a, b);
                      });
}

std::vector<CriticalPoint> find_critical_points(const SphericalChiField& field,
                                                double t_min, int depth,
                                                const FindOptions& opt) {
  if (depth < 0)
    depth = icosphere_depth_for_lmax(field.components()[0].max_l());
  IcoSphere grid = make_icosphere(depth);
  return find_critical_points(field, t_min, grid, opt);
}

std::vector<CriticalPoint> find_critical_points_planar(
    const PlanarChiField& field, double t_min, double half_width, int grid_n,
    const FindOptions& opt) {
  if (!(t_min > 0.0))
    throw std::invalid_argument("find_critical_points_planar: t_min > 0");
  if (grid_n < 2 || !(half_width > 0.0))
    throw std::invalid_argument("find_critical_points_planar: bad grid");
  const double step = 2.0 * half_width / (grid_n - 1);
  auto node = [&](int i) { return -half_width + step * i; };

  std::vector<std::array<double, 2>> grad(static_cast<std::size_t>(grid_n) *
                                          grid_n);
  std::vector<double> gnorm(grad.size());
  for (int i = 0; i < grid_n; ++i)
    for (int j = 0; j < grid_n; ++j) {
      Jet2 jj = field.jet_F(1, node(i), node(j));
      grad[i * grid_n + j] = {jj.grad[0], jj.grad[1]};
      gnorm[i * grid_n + j] = std::hypot(jj.grad[0], jj.grad[1]);
    }
  const double small_norm = 0.1 * median_of(gnorm);

  std::vector<std::array<double, 2>> seeds;
  for (int i = 0; i + 1 < grid_n; ++i)
    for (int j = 0; j + 1 < grid_n; ++j) {
      int q[4] = {i * grid_n + j, (i + 1) * grid_n + j,
                  i * grid_n + j + 1, (i + 1) * grid_n + j + 1};
      bool pos_a = false, neg_a = false, pos_b = false, neg_b = false;
      double min_norm = 1e300;
      for (int c : q) {
        (grad[c][0] > 0 ? pos_a : neg_a) = true;
        (grad[c][1] > 0 ? pos_b : neg_b) = true;
        min_norm = std::min(min_norm, gnorm[c]);
      }
      if ((pos_a && neg_a) || (pos_b && neg_b) || min_norm < small_norm)
        seeds.push_back({node(i) + 0.5 * step, node(j) + 0.5 * step});
    }

  const double f_min = 0.5 * t_min * t_min;
  std::vector<CriticalPoint> found;
  for (const auto& s : seeds) {
    double x = s[0], y = s[1];
    Jet2 j = field.jet_F(2, x, y);
    double gn = std::hypot(j.grad[0], j.grad[1]);
    bool converged = false;
    for (int iter = 0; iter < opt.max_newton_iter; ++iter) {
      if (gn < opt.newton_tol) {
        converged = true;
        break;
      }
      double h11 = j.hess(0, 0), h12 = j.hess(0, 1), h22 = j.hess(1, 1);
      double det = h11 * h22 - h12 * h12;
      double scale = std::max({std::abs(h11), std::abs(h12), std::abs(h22)});
      if (std::abs(det) < 1e-14 * std::max(scale * scale, 1e-30)) break;
      double d1 = (-j.grad[0] * h22 + j.grad[1] * h12) / det;
      double d2 = (-h11 * j.grad[1] + h12 * j.grad[0]) / det;
      bool accepted = false;
      double stp = 1.0;
      for (int halving = 0; halving < 25; ++halving) {
        double cx = x + stp * d1, cy = y + stp * d2;
        Jet2 jc = field.jet_F(2, cx, cy);
        double gc = std::hypot(jc.grad[0], jc.grad[1]);
        if (gc <= (1.0 - 1e-4 * stp) * gn) {
          x = cx;
          y = cy;
          j = jc;
          gn = gc;
          accepted = true;
          break;
        }
        stp *= 0.5;
      }
      if (!accepted) break;
    }
    if (!converged || gn >= opt.newton_tol) continue;
    if (std::abs(x) > half_width || std::abs(y) > half_width) continue;
    if (field.F(x, y) < f_min) continue;
    Jet2 jf = field.jet_f(2, x, y);
    auto eig = eig2x2(jf.hess(0, 0), jf.hess(0, 1), jf.hess(1, 1));
    CriticalPoint cp;
    cp.location = {x, y, 0.0};
    cp.value = jf.value;
    cp.grad_norm = gn;
    cp.hess_eigs = eig;
    cp.index = (eig[0] < 0.0) + (eig[1] < 0.0);
    cp.degenerate =
        std::min(std::abs(eig[0]), std::abs(eig[1])) < opt.degeneracy_tol;
    found.push_back(cp);
  }
  return merge_points(std::move(found), opt.merge_distance,
                      [](const Vec3& a, const Vec3& b) {
                        return std::hypot(a[0] - b[0], a[1] - b[1]);
                      });
}

int count_maxima_above(const std::vector<CriticalPoint>& points, double t) {
  int n = 0;
  for (const CriticalPoint& p : points)
    if (!p.degenerate && p.index == 2 && p.value >= t) ++n;
  return n;
}

int signed_euler_count(const std::vector<CriticalPoint>& points, double t) {
  if (!(t > 0.0))
    throw std::invalid_argument("signed_euler_count: t must be > 0");
  int chi = 0;
  for (const CriticalPoint& p : points) {
    if (p.value < t) continue;
    if (p.degenerate)
      throw std::runtime_error(
          "signed_euler_count: degenerate critical point above threshold");
    chi += (p.index % 2 == 0) ? 1 : -1;
  }
  return chi;
}

int pixel_euler_characteristic(const SphericalChiField& field, double t,
                               const IcoSphere& grid) {
  std::vector<char> in(grid.vertices.size());
  for (std::size_t i = 0; i < grid.vertices.size(); ++i)
    in[i] = field.f(grid.vertices[i]) >= t;
  long v = std::count(in.begin(), in.end(), char(1));
  long e = 0;
  for (const auto& ed : grid.edges())
    if (in[ed[0]] && in[ed[1]]) ++e;
  long f = 0;
  for (const auto& fc : grid.faces)
    if (in[fc[0]] && in[fc[1]] && in[fc[2]]) ++f;
  return static_cast<int>(v - e + f);
}

OracleSource OracleSource::sphere(analytic::PowerSpectrum spec) {
  OracleSource s;
  s.kind = Kind::sphere;
  s.spectrum = std::move(spec);
  return s;
}

OracleSource OracleSource::berry(int waves) {
  OracleSource s;
  s.kind = Kind::berry;
  s.berry_waves = waves;
  return s;
}

OracleSource OracleSource::bargmann_fock(double window) {
  OracleSource s;
  s.kind = Kind::bargmann_fock;
  s.bf_window = window;
  return s;
}

CovarianceOracleReport hessian_covariance_oracle(const OracleSource& source,
                                                 std::int64_t n_realizations,
                                                 const RngStream& base) {
  if (n_realizations < 10000)
    throw std::invalid_argument(
        "hessian_covariance_oracle: needs at least 1e4 realizations");
  const Vec3 p0 = {1.0, 0.0, 0.0};

  Welford w_var1, w_cov13, w_var2, w_h1g, w_cms;
  double fd_max = 0.0;
  double r2 = 1.0;

  for (std::int64_t i = 0; i < n_realizations; ++i) {
    RngStream rng = base;
    rng.seek_block(static_cast<std::uint64_t>(i) * kBatchBlockStride);
    double h1, h2, h3, gamma;
    if (source.kind == OracleSource::Kind::sphere) {
      fieldsim::SphericalFieldSample s =
          fieldsim::synth_sphere(*source.spectrum, rng, /*normalize=*/true);
      r2 = s.r2();
      Jet2 j = fieldsim::jet_on_radius_sphere(s.eval(p0, 2), r2);
      h1 = j.hess(0, 0);
      h2 = j.hess(0, 1);
      h3 = j.hess(1, 1);
      gamma = j.value;
      if (i < 3) {
        Jet2 ja = s.eval(p0, 2);
        fd_max = std::max(
            fd_max, jet_discrepancy(
                        ja,
                        [&](double h) {
                          return fieldsim::fd_jet_sphere(
                              [&](const Vec3& q) { return s.value(q); }, p0,
                              h);
                        },
                        1e-3));
      }
    } else {
      fieldsim::PlanarKind kind = source.kind == OracleSource::Kind::berry
                                      ? PlanarKind::berry
                                      : PlanarKind::bargmann_fock;
      int n = source.kind == OracleSource::Kind::berry ? source.berry_waves : 0;
      fieldsim::PlanarFieldSample s =
          fieldsim::synth_planar(kind, n, rng, source.bf_window);
      Jet2 j = s.eval(0.0, 0.0, 2);
      h1 = j.hess(0, 0);
      h2 = j.hess(0, 1);
      h3 = j.hess(1, 1);
      gamma = j.value;
      if (i < 3) {
        fd_max = std::max(
            fd_max, jet_discrepancy(
                        j,
                        [&](double h) {
                          return fieldsim::fd_jet_planar(
                              [&](double x, double y) { return s.value(x, y); },
                              0.0, 0.0, h);
                        },
                        1e-3));
      }
    }
    w_var1.add(h1 * h1);
    w_cov13.add(h1 * h3);
    w_var2.add(h2 * h2);
    w_h1g.add(h1 * gamma);
    w_cms.add(0.5 * (3.0 * h1 * h3 - h1 * h1));
  }

  CovarianceOracleReport rep;
  rep.var_h1 = w_var1.estimate(base.seed());
  rep.cov_h13 = w_cov13.estimate(base.seed());
  rep.var_h2 = w_var2.estimate(base.seed());
  rep.e_h1_gamma = w_h1g.estimate(base.seed());
  rep.c_minus_sigma2 = w_cms.estimate(base.seed());
  rep.implied_c = rep.cov_h13.value;
  rep.implied_sigma2 = 0.5 * (rep.var_h1.value - rep.cov_h13.value);
  rep.implied_c_minus_sigma2 = rep.implied_c - rep.implied_sigma2;
  rep.r2 = r2;
  rep.fd_max_error = fd_max;
  return rep;
}

}  // namespace chirf::critcount
