#include "sbfem/solver.hpp"

#include <chrono>
#include <cmath>
#include <limits>

namespace sbfem {

namespace {

double elapsed_ms(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

SparseDirectSolver::SparseDirectSolver(const SparseMatrix& matrix) : matrix_(matrix) {
  if (matrix_.rows() != matrix_.cols()) throw SolverError("matrix is not square");
  matrix_.makeCompressed();
  const auto start = std::chrono::steady_clock::now();
  lu_ = std::make_unique<Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>>>();
  lu_->analyzePattern(matrix_);
  lu_->factorize(matrix_);
  factor_ms_ = elapsed_ms(start);
  if (lu_->info() != Eigen::Success) throw SolverError("sparse LU failed: " + lu_->lastErrorMessage());
}

VecX SparseDirectSolver::solve(const VecX& rhs, SolveReport* report) const {
  if (rhs.size() != matrix_.rows()) throw SolverError("right-hand side has the wrong length");
  const auto start = std::chrono::steady_clock::now();
  const double scale = std::max(rhs.norm(), std::numeric_limits<double>::min());
  VecX x = lu_->solve(rhs);
  if (lu_->info() != Eigen::Success) throw SolverError("sparse LU solve failed");
  double res = (rhs - matrix_ * x).norm() / scale;
  int sweeps = 0;
  while (!(res <= kSolveTolerance) && sweeps < 3 && std::isfinite(res)) {
    x += lu_->solve(VecX(rhs - matrix_ * x));
    res = (rhs - matrix_ * x).norm() / scale;
    ++sweeps;
  }
  if (report) {
    report->residual = res;
    report->refinement_sweeps = sweeps;
    report->n = static_cast<int>(matrix_.rows());
    report->nnz = static_cast<long>(matrix_.nonZeros());
    report->factor_ms = factor_ms_;
    report->solve_ms = elapsed_ms(start);
  }
  if (!(res <= kSolveTolerance))
    throw SolverError("relative residual " + std::to_string(res) + " above tolerance after " +
                      std::to_string(sweeps) + " refinement sweeps");
  return x;
}

std::pair<VecX, SolveReport> solve(const BlockSystem& system) {
  SolveReport report;
  SparseDirectSolver solver(system.matrix);
  VecX x = solver.solve(system.rhs, &report);
  return {std::move(x), report};
}

}  // namespace sbfem
