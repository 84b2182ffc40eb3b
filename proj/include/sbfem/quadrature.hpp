#pragma once

#include "sbfem/types.hpp"

#include <vector>

namespace sbfem {

/// Triangle rule in barycentric coordinates. Weights sum to one; scale by the
/// cell area to integrate.
struct QuadratureRule {
  std::vector<Vec3> points;
  std::vector<double> weights;
  int degree = 0;

  int size() const { return static_cast<int>(points.size()); }
};

/// Edge rule on the unit parameter interval [0, 1], weights summing to one.
struct EdgeQuadratureRule {
  std::vector<double> points;
  std::vector<double> weights;
  int degree = 0;

  int size() const { return static_cast<int>(points.size()); }
};

/// Exact to `degree` on triangles. Available: 1 (centroid), 2 (3-point),
/// 4 (6-point), 7 (12-point); other requests round up.
const QuadratureRule& triangle_rule(int degree);

/// 3-point Gauss-Legendre, exact to degree 5.
const EdgeQuadratureRule& edge_rule();

}  // namespace sbfem
