#include "doctest.h"
#include "oracle.hpp"

#include "sbfem/solver.hpp"

using namespace sbfem;

namespace {

SparseMatrix random_sparse(int n, unsigned seed, bool singular) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-1, 1);
  std::uniform_int_distribution<int> col(0, n - 1);
  std::vector<Eigen::Triplet<double>> t;
  for (int i = 0; i < n; ++i) {
    if (singular && i == n / 2) continue;
    t.emplace_back(i, i, 4 + u(rng));
    for (int k = 0; k < 3; ++k) t.emplace_back(i, col(rng), u(rng));
  }
  SparseMatrix A(n, n);
  A.setFromTriplets(t.begin(), t.end());
  if (singular) A.prune([n](int r, int c, double) { return r != n / 2 && c != n / 2; });
  return A;
}

}  // namespace

TEST_CASE("sparse LU agrees with a dense solve") {
  for (unsigned seed : {1u, 2u, 3u}) {
    const SparseMatrix A = random_sparse(60, seed, false);
    const VecX b = oracle::random_vector(60, seed + 100);
    const SparseDirectSolver solver(A);
    SolveReport report;
    const VecX x = solver.solve(b, &report);
    const VecX ref = Eigen::MatrixXd(A).fullPivLu().solve(b);
    CHECK((x - ref).norm() <= 1e-10 * ref.norm());
    CHECK(report.residual <= kSolveTolerance);
    CHECK(report.n == 60);
    CHECK(report.nnz == A.nonZeros());
  }
}

TEST_CASE("singular systems raise SolverError") {
  CHECK_THROWS_AS(SparseDirectSolver(random_sparse(30, 4, true)), SolverError);
  SparseMatrix empty(3, 3);
  CHECK_THROWS_AS(SparseDirectSolver{empty}, SolverError);
}

TEST_CASE("block system convenience solve") {
  BlockSystem sys;
  sys.matrix = random_sparse(20, 9, false);
  sys.rhs = oracle::random_vector(20, 10);
  const auto [x, report] = solve(sys);
  CHECK((sys.matrix * x - sys.rhs).norm() <= 1e-10 * sys.rhs.norm());
  CHECK(report.residual <= kSolveTolerance);
}
