#pragma once

#include "sbfem/dofmap.hpp"
#include "sbfem/model.hpp"

#include <array>
#include <utility>

namespace sbfem {

struct TimeGrid {
  double T = 1;
  double dt = 1;
  int steps = 1;

  /// Throws ParameterError unless dt > 0 and T / dt is an integer >= 1.
  static TimeGrid make(double T, double dt);
  double time(int n) const { return n * dt; }
};

// Blocks in the within-field numbering of the DofMap (constrained dofs
// included). Rows are test functions.

SparseMatrix assemble_a_f(const DofMap& dofs, const PhysicalParams& params);
SparseMatrix assemble_a_p_d(const DofMap& dofs, const PhysicalParams& params);
SparseMatrix assemble_a_p_e(const DofMap& dofs, const PhysicalParams& params);
SparseMatrix assemble_b_f(const DofMap& dofs);      // p_f x u_f
SparseMatrix assemble_b_p(const DofMap& dofs);      // p_p x u_p
SparseMatrix assemble_b_p_eta(const DofMap& dofs);  // p_p x eta_p, without alpha
SparseMatrix assemble_mass_p(const DofMap& dofs);   // p_p x p_p

struct BjsBlocks {
  SparseMatrix uu;   // u_f x u_f
  SparseMatrix ue;   // u_f x eta_p, carries the minus sign
  SparseMatrix ee;   // eta_p x eta_p
};
BjsBlocks assemble_a_BJS(const DofMap& dofs, const PhysicalParams& params);

struct GammaBlocks {
  SparseMatrix f;  // lambda x u_f
  SparseMatrix p;  // lambda x u_p
  SparseMatrix e;  // lambda x eta_p
};
GammaBlocks assemble_b_Gamma(const DofMap& dofs);

/// Reduced linear system of one backward-Euler step.
struct BlockSystem {
  SparseMatrix matrix;  // free x free
  VecX rhs;
  std::array<std::pair<int, int>, kFieldCount> blocks{};  // [begin, end) per field in free numbering
};

/// Interpolant of a closed-form solution: nodal for Lagrange fields, edge
/// fluxes for RT0, cell means for P0 and edge means for the multiplier.
SystemState interpolate_exact(const ManufacturedCase& exact, const DofMap& dofs, double t);

/// Projected initial data: cell means of p_p0 and the nodal interpolant of
/// eta0. The remaining fields come from `exact` when given and are zero
/// otherwise.
SystemState apply_initial_conditions(const ProblemData& data, const DofMap& dofs,
                                     const ManufacturedCase* exact = nullptr);

/// Assembles and caches everything that does not change between steps.
class StepAssembler {
 public:
  StepAssembler(const DofMap& dofs, const PhysicalParams& params, double dt);

  const DofMap& dofs() const { return *dofs_; }
  double dt() const { return dt_; }

  /// Full coupled matrix, constrained rows and columns included.
  const SparseMatrix& full_matrix() const { return full_; }
  const SparseMatrix& reduced_matrix() const { return reduced_; }

  /// Full right-hand side at t_new, before boundary lifting.
  VecX full_rhs(const ProblemData& data, const SystemState& previous, double t_new) const;

  /// Constrained values at time t (zero in every free slot).
  VecX boundary_values(const ProblemData& data, double t) const;

  BlockSystem system(const ProblemData& data, const SystemState& previous, double t_new) const;

  /// Scatters a free solution and the boundary values into a full state.
  SystemState expand(const VecX& free_solution, const ProblemData& data, double t) const;

 private:
  const DofMap* dofs_;
  PhysicalParams params_;
  double dt_;
  BjsBlocks bjs_;
  GammaBlocks gamma_;
  SparseMatrix b_eta_, mass_p_;
  SparseMatrix full_;
  SparseMatrix reduced_;
  SparseMatrix restrict_;  // free x full selection
};

BlockSystem assemble_step_system(const DofMap& dofs, const PhysicalParams& params, const ProblemData& data,
                                 const SystemState& previous, double t_new, double dt);

}  // namespace sbfem
