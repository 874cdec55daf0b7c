#ifndef CHIRF_GEOM_HPP
#define CHIRF_GEOM_HPP

#include <array>
#include <cmath>

namespace chirf {

using Vec3 = std::array<double, 3>;

inline double dot(const Vec3& a, const Vec3& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2],
          a[0] * b[1] - a[1] * b[0]};
}

inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

inline Vec3 normalized(const Vec3& a) {
  double n = norm(a);
  return {a[0] / n, a[1] / n, a[2] / n};
}

inline Vec3 operator+(const Vec3& a, const Vec3& b) {
  return {a[0] + b[0], a[1] + b[1], a[2] + b[2]};
}

inline Vec3 operator-(const Vec3& a, const Vec3& b) {
  return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}

inline Vec3 operator*(double s, const Vec3& a) {
  return {s * a[0], s * a[1], s * a[2]};
}

// Geodesic distance on the unit sphere.
inline double geodesic_distance(const Vec3& a, const Vec3& b) {
  double c = std::clamp(dot(a, b), -1.0, 1.0);
  return std::acos(c);
}

// Walk along the geodesic from p in unit tangent direction u by angle s.
inline Vec3 geodesic_step(const Vec3& p, const Vec3& u, double s) {
  return std::cos(s) * p + std::sin(s) * u;
}

// Orthonormal tangent frame (east, north).  Within 1e-12 of the poles the
// east/north directions are undefined and the frame falls back to (x, y).
struct TangentFrame {
  Vec3 e1;
  Vec3 e2;
};

inline TangentFrame tangent_frame(const Vec3& p) {
  double s = std::hypot(p[0], p[1]);
  if (s < 1e-12) return {{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}};
  Vec3 east = {-p[1] / s, p[0] / s, 0.0};
  Vec3 north = {-p[2] * p[0] / s, -p[2] * p[1] / s, s};
  return {east, north};
}

}  // namespace chirf

#endif
