#pragma once

#include "sbfem/mesh.hpp"

#include <array>
#include <vector>

namespace sbfem {

// Local shape functions on a triangle.
//
//   P1:  one per vertex, phi_i = lambda_i.
//   P2:  vertices 0..2, then node 3+i at the midpoint of local edge i
//        (the edge opposite vertex i).
//   RT0: one per local edge, phi_i = s_i (x - x_i) / (2|K|), where s_i = +1
//        when the global edge normal points out of K. The flux of phi_i
//        through its edge along the global normal is 1.

template <typename Scalar>
Eigen::Matrix<Scalar, 6, 1> p2_values(const Eigen::Matrix<Scalar, 3, 1>& l) {
  Eigen::Matrix<Scalar, 6, 1> v;
  for (int i = 0; i < 3; ++i) {
    v[i] = l[i] * (Scalar(2) * l[i] - Scalar(1));
    v[3 + i] = Scalar(4) * l[(i + 1) % 3] * l[(i + 2) % 3];
  }
  return v;
}

inline std::array<Vec2, 6> p2_gradients(const CellGeometry& g, const Vec3& l) {
  std::array<Vec2, 6> d;
  for (int i = 0; i < 3; ++i) {
    const int j = (i + 1) % 3, k = (i + 2) % 3;
    d[i] = (4 * l[i] - 1) * g.grad_bary[i];
    d[3 + i] = 4 * (l[j] * g.grad_bary[k] + l[k] * g.grad_bary[j]);
  }
  return d;
}

// Second derivatives are constant on the cell.
inline std::array<Mat2, 6> p2_hessians(const CellGeometry& g) {
  std::array<Mat2, 6> h;
  for (int i = 0; i < 3; ++i) {
    const Vec2& a = g.grad_bary[i];
    const Vec2& b = g.grad_bary[(i + 1) % 3];
    const Vec2& c = g.grad_bary[(i + 2) % 3];
    h[i] = 4 * a * a.transpose();
    h[3 + i] = 4 * (b * c.transpose() + c * b.transpose());
  }
  return h;
}

inline std::array<Vec2, 3> rt0_values(const CellGeometry& g, const std::array<double, 3>& sign, const Vec2& x) {
  std::array<Vec2, 3> v;
  for (int i = 0; i < 3; ++i) v[i] = sign[i] * (x - g.x[i]) / (2 * g.area);
  return v;
}

inline std::array<double, 3> rt0_divergence(const CellGeometry& g, const std::array<double, 3>& sign) {
  return {sign[0] / g.area, sign[1] / g.area, sign[2] / g.area};
}

// d(phi_i)_a / dx_b, constant per cell.
inline std::array<Mat2, 3> rt0_jacobians(const CellGeometry& g, const std::array<double, 3>& sign) {
  std::array<Mat2, 3> j;
  for (int i = 0; i < 3; ++i) j[i] = Mat2::Identity() * sign[i] / (2 * g.area);
  return j;
}

/// Orientation signs of a cell's RT0 functions against the global edge normals.
std::array<double, 3> rt0_signs(const Mesh& mesh, int cell);

/// Global normal of an edge: the tangent v[0] -> v[1] rotated clockwise.
Vec2 edge_normal(const Mesh& mesh, int edge);

/// Barycentric coordinates in `cell` of the point at parameter s along
/// `edge`, measured from edge.v[0] to edge.v[1].
Vec3 edge_point_in_cell(const Mesh& mesh, int cell, int edge, double s);

enum class Family { P1, P2, RT0 };

struct BasisValues {
  std::vector<double> value;     // P1, P2
  std::vector<Vec2> vector;      // RT0
  std::vector<Vec2> gradient;    // P1, P2
  std::vector<Mat2> jacobian;    // RT0
  std::vector<double> divergence;  // RT0
};

/// Reference-point evaluation of a whole local basis. `signs` is used only
/// by RT0.
BasisValues eval_basis(Family family, const CellGeometry& g, const Vec3& bary,
                       const std::array<double, 3>& signs = {1, 1, 1});

}  // namespace sbfem
