#ifndef CHIRF_SPHERE_GRID_HPP
#define CHIRF_SPHERE_GRID_HPP

#include <array>
#include <cstdint>
#include <vector>

#include "chirf/geom.hpp"

namespace chirf {

// Geodesic icosahedral grid: `depth` face bisections (20 * 4^depth
// triangles, 10 * 4^depth + 2 vertices).  The whole grid is turned by a
// fixed small rotation so no vertex lands on the poles or coordinate axes.
struct IcoSphere {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> faces;

  // Unique undirected edges.
  std::vector<std::array<int, 2>> edges() const;
  // 1-ring neighbor lists.
  std::vector<std::vector<int>> neighbors() const;
  // Max edge arc length (cell diameter proxy).
  double max_edge_arc() const;
};

IcoSphere make_icosphere(int depth);

// Smallest depth whose cell diameter is below one third of the correlation
// scale pi / lmax.
int icosphere_depth_for_lmax(int lmax);

}  // namespace chirf

#endif
