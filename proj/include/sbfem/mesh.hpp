#pragma once

#include "sbfem/types.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace sbfem {

enum class Subdomain : std::uint8_t { Fluid = 0, Porous = 1 };

enum class EdgeTag : std::uint8_t {
  InteriorFluid,
  InteriorPorous,
  GammaF,   // external fluid boundary, velocity Dirichlet
  GammaPD,  // external porous boundary, pressure (natural) + displacement Dirichlet
  GammaPN,  // external porous boundary, normal flux + displacement Dirichlet
  GammaFP,  // fluid/porous interface
};

std::string_view to_string(Subdomain s);
std::string_view to_string(EdgeTag t);
EdgeTag edge_tag_from_string(std::string_view name);

using EdgeKey = std::pair<int, int>;  // sorted vertex pair

inline EdgeKey make_edge_key(int a, int b) { return a < b ? EdgeKey{a, b} : EdgeKey{b, a}; }

struct Cell {
  // Counterclockwise. v[0] is the newest vertex; (v[1], v[2]) is the refinement edge.
  std::array<int, 3> v;
  Subdomain subdomain;
};

struct Edge {
  std::array<int, 2> v;       // v[0] < v[1]
  std::array<int, 2> cells;   // cells[0] < cells[1]; cells[1] == -1 on the boundary
  std::array<int, 2> local;   // local edge index inside each incident cell
  EdgeTag tag;

  bool is_boundary() const { return cells[1] < 0; }
};

/// Conforming triangulation of the fluid and porous subdomains.
///
/// Immutable after construction. Local edge i of a cell is the edge opposite
/// local vertex i, so local edge 0 is the refinement edge.
class Mesh {
 public:
  Mesh() = default;

  /// `boundary_tags` must tag every external boundary edge; interface edges
  /// are recognised from the subdomain change and need not be listed.
  Mesh(std::vector<Vec2> vertices, std::vector<Cell> cells,
       const std::map<EdgeKey, EdgeTag>& boundary_tags);

  int n_vertices() const { return static_cast<int>(vertices_.size()); }
  int n_cells() const { return static_cast<int>(cells_.size()); }
  int n_edges() const { return static_cast<int>(edges_.size()); }

  const std::vector<Vec2>& vertices() const { return vertices_; }
  const Vec2& vertex(int i) const { return vertices_[i]; }
  const std::vector<Cell>& cells() const { return cells_; }
  const Cell& cell(int c) const { return cells_[c]; }
  Subdomain subdomain(int c) const { return cells_[c].subdomain; }
  const std::vector<Edge>& edges() const { return edges_; }
  const Edge& edge(int e) const { return edges_[e]; }
  const std::array<int, 3>& cell_edges(int c) const { return cell_edges_[c]; }

  /// Global edge index, or -1.
  int find_edge(int a, int b) const;

  /// The neighbour across local edge `local` of cell `c`, or -1.
  int neighbor(int c, int local) const;

  /// Tags of all boundary and interface edges, keyed by vertex pair.
  std::map<EdgeKey, EdgeTag> boundary_tags() const;

  double h_max() const;
  double tagged_length(EdgeTag tag) const;

 private:
  void build_edges(const std::map<EdgeKey, EdgeTag>& boundary_tags);

  std::vector<Vec2> vertices_;
  std::vector<Cell> cells_;
  std::vector<Edge> edges_;
  std::vector<std::array<int, 3>> cell_edges_;
  std::vector<std::pair<std::uint64_t, int>> edge_lookup_;  // sorted (key, edge)
};

struct CellGeometry {
  std::array<Vec2, 3> x;              // vertex coordinates
  double area = 0;
  double h = 0;                       // diameter (longest edge)
  double rho = 0;                     // inscribed-circle diameter
  std::array<double, 3> edge_length{};
  std::array<Vec2, 3> normal;         // outward unit normal of local edge i
  std::array<Vec2, 3> tangent;        // unit tangent of local edge i, counterclockwise
  std::array<Vec2, 3> grad_bary;      // gradients of the barycentric coordinates

  Vec2 map(const Vec3& bary) const { return bary[0] * x[0] + bary[1] * x[1] + bary[2] * x[2]; }
  Vec2 centroid() const { return (x[0] + x[1] + x[2]) / 3.0; }
};

CellGeometry cell_geometry(const Vec2& a, const Vec2& b, const Vec2& c);
CellGeometry cell_geometry(const Mesh& mesh, int cell);

/// Largest h_K / rho_K over the mesh.
double shape_regularity(const Mesh& mesh);

struct RectangleConfig {
  double x_min = 0, x_max = 1;
  double y_min = 0, y_max = 1;
  double y_interface = 0.5;
  int nx = 4;
  int ny = 4;
  EdgeTag porous_sides = EdgeTag::GammaPN;
  EdgeTag porous_bottom = EdgeTag::GammaPD;
};

/// Structured split-rectangle mesh: fluid above the interface, porous below.
Mesh build_reference_geometry(const RectangleConfig& config);

struct RefineResult {
  Mesh mesh;
  std::vector<std::vector<int>> children;  // input cell -> output cells covering it
};

/// Newest-vertex bisection with conforming closure. Every marked cell is
/// bisected at least once.
RefineResult refine(const Mesh& mesh, std::span<const int> marked);

/// Bisects every cell twice: the structured equivalent of halving h.
Mesh refine_uniform(const Mesh& mesh);

struct ConformityAudit {
  bool ok = true;
  std::string message;
};

/// Edge incidence, interface, orientation and hanging-node checks.
ConformityAudit audit_conformity(const Mesh& mesh);

}  // namespace sbfem
