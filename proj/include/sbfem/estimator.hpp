#pragma once

#include "sbfem/assembly.hpp"

#include <array>
#include <vector>

namespace sbfem {

struct EstimatorOptions {
  bool porous_jump_uses_mu_p = false;  // printed form uses the fluid viscosity
  bool strict_printed_signs = false;   // +div u_p in the porous mass residual
};

/// Data projections of one cell: means on fluid cells, local L2 projections
/// onto P1 (barycentric nodal coefficients) on porous cells.
struct CellProjection {
  Vec2 f_mean = Vec2::Zero();
  double q_mean = 0;
  std::array<Vec2, 3> f_p1{Vec2::Zero(), Vec2::Zero(), Vec2::Zero()};
  std::array<double, 3> q_p1{};

  Vec2 f_at(const Vec3& bary) const { return bary[0] * f_p1[0] + bary[1] * f_p1[1] + bary[2] * f_p1[2]; }
  double q_at(const Vec3& bary) const { return bary.dot(Vec3(q_p1[0], q_p1[1], q_p1[2])); }
};

CellProjection project_cell(const ProblemData& data, const Mesh& mesh, int cell, double t);
std::vector<CellProjection> project_data(const ProblemData& data, const Mesh& mesh, double t);

// Squared L2(K) norms of the approximate element residuals.

struct FluidResiduals {
  Vec2 momentum = Vec2::Zero();  // f_K + div sigma_f, constant on K
  double momentum_norm2 = 0;
  double mass_norm2 = 0;         // q_K - div u_h
};

/// Throws DomainError on porous cells.
FluidResiduals element_residuals_fluid(const DofMap& dofs, const PhysicalParams& params, const SystemState& current,
                                       const CellProjection& proj, int cell);

struct PorousResiduals {
  double force_norm2 = 0;  // f_{p,K} + div sigma_p; div sigma_p vanishes for P1 / P0
  double darcy_norm2 = 0;  // mu K^-1 u_h + grad p_h; grad p_h vanishes for P0
  double curl = 0;         // curl of the Darcy residual, constant on K
  double curl_norm2 = 0;
  double mass_norm2 = 0;   // q_{p,K} - d_t(s0 p_h + alpha div eta_h) - div u_h
};

/// Throws DomainError on fluid cells.
PorousResiduals element_residuals_porous(const DofMap& dofs, const PhysicalParams& params, const SystemState& current,
                                         const SystemState& previous, const CellProjection& proj, int cell,
                                         double dt, const EstimatorOptions& options = {});

/// Normal stress jump across an interior edge at the edge Gauss points,
/// lower-id side minus higher-id side along the outward normal of the
/// lower-id cell. Throws DomainError on boundary and interface edges.
std::vector<Vec2> edge_jump(const DofMap& dofs, const PhysicalParams& params, const SystemState& state, int edge,
                            const EstimatorOptions& options = {});
double edge_jump_norm2(const DofMap& dofs, const PhysicalParams& params, const SystemState& state, int edge,
                       const EstimatorOptions& options = {});

struct InterfaceResiduals {
  std::vector<double> R1, R2, R4;  // at the edge Gauss points
  std::vector<Vec2> R3;
  std::array<double, 4> norm2{};
};

/// Interface residuals with the interface data subtracted. Throws
/// DomainError unless the edge is on the interface.
InterfaceResiduals interface_residuals(const DofMap& dofs, const PhysicalParams& params, const ProblemData& data,
                                       const SystemState& current, const SystemState& previous, int edge, double dt);

/// Data oscillation parts (unweighted): ||f - f_K||^2 and ||q - q_K||^2.
std::array<double, 2> oscillation(const ProblemData& data, const Mesh& mesh, const CellProjection& proj, int cell,
                                  double t);

enum CellTerm : int {
  kFluidMomentum,
  kFluidMass,
  kPorousForce,
  kPorousDarcy,
  kPorousCurl,
  kPorousMass,
  kOscForce,
  kOscSource,
  kCellTermCount
};

/// Unweighted squared spatial norms of one time step. Edge slots: the jump
/// norm in slot 0 for interior edges, R1..R4 for interface edges.
struct StepNorms {
  std::vector<std::array<double, kCellTermCount>> cell;
  std::vector<std::array<double, 4>> edge;
};

StepNorms step_norms(const DofMap& dofs, const PhysicalParams& params, const ProblemData& data,
                     const SystemState& current, const SystemState& previous, double dt,
                     const EstimatorOptions& options = {});

/// Running maximum over time steps, entry by entry.
void accumulate_step(StepNorms& running, const StepNorms& step);

struct ElementIndicator {
  int cell = 0;
  Subdomain subdomain = Subdomain::Fluid;
  double h = 0;
  double theta_f2 = 0;
  double theta_p2 = 0;
  double theta_pf2 = 0;
  double zeta2 = 0;

  double theta2() const { return theta_f2 + theta_p2 + theta_pf2; }
};

struct EstimatorReport {
  std::vector<ElementIndicator> cells;
  double theta = 0;
  double zeta = 0;
  int steps = 0;
};

/// Applies the h weights and assigns every edge term to each incident cell.
EstimatorReport finalize_report(const Mesh& mesh, const StepNorms& running, int steps);

/// Root of the sums of squares over the element table: (Theta, zeta).
std::pair<double, double> global_estimate(const EstimatorReport& report);

/// Time loop helper: feed every step, read the report at the end.
class EstimatorAccumulator {
 public:
  EstimatorAccumulator(const DofMap& dofs, const PhysicalParams& params, EstimatorOptions options = {});

  void add_step(const ProblemData& data, const SystemState& current, const SystemState& previous, double dt);
  EstimatorReport report() const;

 private:
  const DofMap* dofs_;
  PhysicalParams params_;
  EstimatorOptions options_;
  StepNorms running_;
  int steps_ = 0;
};

}  // namespace sbfem
