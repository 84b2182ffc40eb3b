#pragma once

#include "sbfem/mesh.hpp"

#include <iosfwd>
#include <string>

namespace sbfem {

// Plain-text mesh format:
//
//   sbmesh 1
//   vertices N
//   x y                 (N lines)
//   cells M
//   v0 v1 v2 subdomain  (M lines; subdomain is fluid|porous or 0|1)
//   boundary_edges P
//   v0 v1 tag           (P lines; gamma_f|gamma_pd|gamma_pn|gamma_fp)
//
// Cell vertex order is preserved, so refinement metadata round-trips.
Mesh read_mesh_text(std::istream& in);
void write_mesh_text(std::ostream& out, const Mesh& mesh);

/// Gmsh MSH 2.2 ASCII. Physical groups named fluid/porous (triangles) and
/// gamma_f/gamma_pd/gamma_pn/gamma_fp (lines). Cells are reoriented
/// counterclockwise and the longest edge becomes the refinement edge.
Mesh read_gmsh22(std::istream& in);

Mesh load_mesh(const std::string& path);

}  // namespace sbfem
