#pragma once

#include "sbfem/basis.hpp"
#include "sbfem/mesh.hpp"

#include <array>
#include <span>
#include <string_view>
#include <vector>

namespace sbfem {

enum class Field : int {
  StokesVelocity = 0,  // vector P2 on fluid cells, fixed on Gamma_f
  StokesPressure,      // P1 on fluid cells
  DarcyVelocity,       // RT0 on porous cells, normal flux fixed on Gamma_p^N
  DarcyPressure,       // P0 on porous cells
  Displacement,        // vector P1 on porous cells, fixed on Gamma_p
  Multiplier,          // P0 on interface edges
};
inline constexpr int kFieldCount = 6;
inline constexpr std::array<Field, kFieldCount> kAllFields = {
    Field::StokesVelocity, Field::StokesPressure, Field::DarcyVelocity,
    Field::DarcyPressure,  Field::Displacement,   Field::Multiplier};

std::string_view to_string(Field f);

struct SpaceDescriptor {
  Field field;
  Family family;   // P0 fields report P1 with degree 0
  int degree;
  int components;
  Subdomain support;
  std::vector<EdgeTag> constrained_on;
};

SpaceDescriptor describe(Field f);

/// Degree-of-freedom layout for the six fields on one mesh.
///
/// Every field owns a contiguous block of the "full" coefficient vector,
/// constrained dofs included. Free dofs are numbered separately for the
/// reduced linear system.
class DofMap {
 public:
  explicit DofMap(const Mesh& mesh);

  const Mesh& mesh() const { return *mesh_; }

  int count(Field f) const { return count_[static_cast<int>(f)]; }
  int offset(Field f) const { return offset_[static_cast<int>(f)]; }
  int total() const { return total_; }
  int n_free() const { return static_cast<int>(free_to_full_.size()); }
  int free_index(int full) const { return full_to_free_[full]; }
  bool constrained(int full) const { return full_to_free_[full] < 0; }
  std::span<const int> free_to_full() const { return free_to_full_; }

  // Cell-local dofs, numbered within the field block.
  // Stokes velocity: 2 * node + component over the 6 P2 nodes.
  std::array<int, 12> stokes_velocity_dofs(int cell) const;
  std::array<int, 3> stokes_pressure_dofs(int cell) const;
  std::array<int, 3> darcy_velocity_dofs(int cell) const;  // local edge order
  int darcy_pressure_dof(int cell) const { return porous_cell_[cell]; }
  // Displacement: 2 * vertex + component.
  std::array<int, 6> displacement_dofs(int cell) const;
  int multiplier_dof(int edge) const { return interface_edge_[edge]; }

  std::vector<int> cell_dofs(Field f, int cell) const;

  // Entity -> node maps (-1 when the entity does not carry the space).
  int fluid_vertex_node(int v) const { return fluid_vertex_[v]; }
  int fluid_edge_node(int e) const { return fluid_edge_[e]; }
  int porous_vertex_node(int v) const { return porous_vertex_[v]; }
  int porous_edge_dof(int e) const { return porous_edge_[e]; }

  const std::vector<int>& fluid_cells() const { return fluid_cells_; }
  const std::vector<int>& porous_cells() const { return porous_cells_; }
  const std::vector<int>& interface_edges() const { return interface_edges_list_; }

 private:
  const Mesh* mesh_;
  std::array<int, kFieldCount> count_{};
  std::array<int, kFieldCount> offset_{};
  int total_ = 0;
  std::vector<int> full_to_free_;
  std::vector<int> free_to_full_;

  std::vector<int> fluid_vertex_, fluid_edge_, porous_vertex_, porous_edge_, porous_cell_, interface_edge_;
  std::vector<int> fluid_cells_, porous_cells_, interface_edges_list_;
  int n_fluid_vertices_ = 0;
};

/// Solution coefficients of all six fields at one time level.
struct SystemState {
  double t = 0;
  VecX values;  // full layout of the DofMap

  auto field(const DofMap& dofs, Field f) { return values.segment(dofs.offset(f), dofs.count(f)); }
  auto field(const DofMap& dofs, Field f) const { return values.segment(dofs.offset(f), dofs.count(f)); }
};

// Cell-local field evaluation.

struct FluidLocal {
  CellGeometry geo;
  std::array<Vec2, 6> u;    // P2 nodal velocities
  std::array<double, 3> p;  // P1 nodal pressures

  Vec2 velocity(const Vec3& bary) const;
  Mat2 velocity_gradient(const Vec3& bary) const;  // (i, j) = d u_i / d x_j
  double pressure(const Vec3& bary) const;
  Vec2 pressure_gradient() const;
  Vec2 laplacian_velocity() const;         // constant on the cell
  Vec2 grad_div_velocity() const;          // constant on the cell
};

struct PorousLocal {
  CellGeometry geo;
  std::array<double, 3> sign;   // RT0 orientation
  std::array<double, 3> flux;   // RT0 coefficients
  double p = 0;                 // P0 pressure
  std::array<Vec2, 3> eta;      // P1 nodal displacements

  Vec2 darcy_velocity(const Vec2& x) const;
  double darcy_divergence() const;
  Mat2 darcy_jacobian() const;
  Vec2 displacement(const Vec3& bary) const;
  Mat2 displacement_gradient() const;
};

FluidLocal gather_fluid(const DofMap& dofs, const VecX& values, int cell);
PorousLocal gather_porous(const DofMap& dofs, const VecX& values, int cell);

struct InterfaceEdge {
  int edge = -1;
  int fluid_cell = -1;
  int porous_cell = -1;
  Vec2 n_f;       // outward normal of the fluid cell
  double length = 0;
};

/// Throws DomainError unless `edge` is tagged GammaFP.
InterfaceEdge interface_edge(const Mesh& mesh, int edge);

/// Values of one field along an edge at the 3-point Gauss nodes, taken from
/// the given incident cell. Points run from edge.v[0] to edge.v[1].
struct EdgeTrace {
  std::vector<Vec2> x;
  std::vector<double> scalar;  // pressures
  std::vector<Vec2> vector;    // velocities, displacement
  std::vector<Mat2> gradient;  // Stokes velocity, displacement
};

EdgeTrace trace_on_edge(const DofMap& dofs, const VecX& values, Field field, int edge, int cell);

}  // namespace sbfem
