#include "sbfem/basis.hpp"

namespace sbfem {

Vec2 edge_normal(const Mesh& mesh, int edge) {
  const Edge& e = mesh.edge(edge);
  const Vec2 t = (mesh.vertex(e.v[1]) - mesh.vertex(e.v[0])).normalized();
  return {t.y(), -t.x()};
}

std::array<double, 3> rt0_signs(const Mesh& mesh, int cell) {
  const auto g = cell_geometry(mesh, cell);
  std::array<double, 3> s{};
  for (int i = 0; i < 3; ++i) s[i] = edge_normal(mesh, mesh.cell_edges(cell)[i]).dot(g.normal[i]) > 0 ? 1.0 : -1.0;
  return s;
}

Vec3 edge_point_in_cell(const Mesh& mesh, int cell, int edge, double s) {
  const Edge& e = mesh.edge(edge);
  const auto& v = mesh.cell(cell).v;
  Vec3 bary = Vec3::Zero();
  bool found0 = false, found1 = false;
  for (int i = 0; i < 3; ++i) {
    if (v[i] == e.v[0]) {
      bary[i] = 1 - s;
      found0 = true;
    } else if (v[i] == e.v[1]) {
      bary[i] = s;
      found1 = true;
    }
  }
  if (!found0 || !found1) throw DomainError("edge is not incident to the cell");
  return bary;
}

BasisValues eval_basis(Family family, const CellGeometry& g, const Vec3& bary, const std::array<double, 3>& signs) {
  BasisValues out;
  switch (family) {
    case Family::P1:
      for (int i = 0; i < 3; ++i) {
        out.value.push_back(bary[i]);
        out.gradient.push_back(g.grad_bary[i]);
      }
      break;
    case Family::P2: {
      const auto v = p2_values<double>(bary);
      const auto d = p2_gradients(g, bary);
      for (int i = 0; i < 6; ++i) {
        out.value.push_back(v[i]);
        out.gradient.push_back(d[i]);
      }
      break;
    }
    case Family::RT0: {
      const auto v = rt0_values(g, signs, g.map(bary));
      const auto div = rt0_divergence(g, signs);
      const auto jac = rt0_jacobians(g, signs);
      for (int i = 0; i < 3; ++i) {
        out.vector.push_back(v[i]);
        out.divergence.push_back(div[i]);
        out.jacobian.push_back(jac[i]);
      }
      break;
    }
  }
  return out;
}

}  // namespace sbfem
