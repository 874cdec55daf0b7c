#include "chirf/sphere_grid.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

#include "chirf/special.hpp"

namespace chirf {

namespace {

Vec3 rotate_fixed(const Vec3& v) {
  // fixed irrational-angle rotation about two axes; keeps vertices off the
  // poles and coordinate planes
  const double a = 0.37, b = 0.21;
  double ca = std::cos(a), sa = std::sin(a);
  double cb = std::cos(b), sb = std::sin(b);
  Vec3 r1 = {v[0], ca * v[1] - sa * v[2], sa * v[1] + ca * v[2]};
  return {cb * r1[0] - sb * r1[1], sb * r1[0] + cb * r1[1], r1[2]};
}

}  // namespace

IcoSphere make_icosphere(int depth) {
  if (depth < 0 || depth > 9)
    throw std::invalid_argument("make_icosphere: depth out of range [0, 9]");
  const double phi = 0.5 * (1.0 + std::sqrt(5.0));
  std::vector<Vec3> verts = {
      {-1, phi, 0}, {1, phi, 0},   {-1, -phi, 0}, {1, -phi, 0},
      {0, -1, phi}, {0, 1, phi},   {0, -1, -phi}, {0, 1, -phi},
      {phi, 0, -1}, {phi, 0, 1},   {-phi, 0, -1}, {-phi, 0, 1},
  };
  for (Vec3& v : verts) v = normalized(v);
  std::vector<std::array<int, 3>> faces = {
      {0, 11, 5},  {0, 5, 1},   {0, 1, 7},   {0, 7, 10},  {0, 10, 11},
      {1, 5, 9},   {5, 11, 4},  {11, 10, 2}, {10, 7, 6},  {7, 1, 8},
      {3, 9, 4},   {3, 4, 2},   {3, 2, 6},   {3, 6, 8},   {3, 8, 9},
      {4, 9, 5},   {2, 4, 11},  {6, 2, 10},  {8, 6, 7},   {9, 8, 1},
  };
  for (int d = 0; d < depth; ++d) {
    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int i, int j) {
      auto key = std::minmax(i, j);
      auto it = midpoint.find(key);
      if (it != midpoint.end()) return it->second;
      Vec3 m = normalized(verts[i] + verts[j]);
      verts.push_back(m);
      int idx = static_cast<int>(verts.size()) - 1;
      midpoint.emplace(key, idx);
      return idx;
    };
    std::vector<std::array<int, 3>> next;
    next.reserve(faces.size() * 4);
    for (const auto& f : faces) {
      int a = mid(f[0], f[1]), b = mid(f[1], f[2]), c = mid(f[2], f[0]);
      next.push_back({f[0], a, c});
      next.push_back({f[1], b, a});
      next.push_back({f[2], c, b});
      next.push_back({a, b, c});
    }
    faces = std::move(next);
  }
  IcoSphere out;
  out.vertices.reserve(verts.size());
  for (const Vec3& v : verts) out.vertices.push_back(rotate_fixed(v));
  out.faces = std::move(faces);
  return out;
}

std::vector<std::array<int, 2>> IcoSphere::edges() const {
  std::set<std::pair<int, int>> seen;
  for (const auto& f : faces) {
    seen.insert(std::minmax(f[0], f[1]));
    seen.insert(std::minmax(f[1], f[2]));
    seen.insert(std::minmax(f[2], f[0]));
  }
  std::vector<std::array<int, 2>> out;
  out.reserve(seen.size());
  for (const auto& [a, b] : seen) out.push_back({a, b});
  return out;
}

std::vector<std::vector<int>> IcoSphere::neighbors() const {
  std::vector<std::vector<int>> nb(vertices.size());
  for (const auto& e : edges()) {
    nb[e[0]].push_back(e[1]);
    nb[e[1]].push_back(e[0]);
  }
  return nb;
}

double IcoSphere::max_edge_arc() const {
  double m = 0.0;
  for (const auto& e : edges())
    m = std::max(m, geodesic_distance(vertices[e[0]], vertices[e[1]]));
  return m;
}

int icosphere_depth_for_lmax(int lmax) {
  // base icosahedron edge is ~1.107 rad and halves per subdivision
  double target = kPi / (3.0 * std::max(lmax, 1));
  int depth = 0;
  double edge = 1.107;
  while (edge >= target && depth < 9) {
    edge *= 0.5;
    ++depth;
  }
  return std::max(depth, 3);
}

}  // namespace chirf
