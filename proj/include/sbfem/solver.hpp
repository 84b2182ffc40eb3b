#pragma once

#include "sbfem/assembly.hpp"

#include <Eigen/OrderingMethods>
#include <Eigen/SparseLU>

#include <memory>
#include <string>
#include <utility>

namespace sbfem {

struct SolveReport {
  double residual = 0;     // ||Ax - b|| / max(||b||, eps)
  int refinement_sweeps = 0;
  int n = 0;
  long nnz = 0;
  double factor_ms = 0;
  double solve_ms = 0;
};

inline constexpr double kSolveTolerance = 1e-10;

/// Sparse LU with COLAMD ordering, factored once and reused across steps.
class SparseDirectSolver {
 public:
  /// Throws SolverError on a structurally or numerically singular matrix.
  explicit SparseDirectSolver(const SparseMatrix& matrix);

  /// Throws SolverError when the residual check fails after refinement.
  VecX solve(const VecX& rhs, SolveReport* report = nullptr) const;

  double factor_ms() const { return factor_ms_; }

 private:
  SparseMatrix matrix_;
  std::unique_ptr<Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>>> lu_;
  double factor_ms_ = 0;
};

std::pair<VecX, SolveReport> solve(const BlockSystem& system);

}  // namespace sbfem
