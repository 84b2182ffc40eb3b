#pragma once

#include "sbfem/simulation.hpp"

#include <functional>
#include <vector>

namespace sbfem {

struct AdaptConfig {
  double theta_mark = 0.5;
  int max_iters = 6;
  double target_theta = 0;  // stop once Theta <= target
  int dof_budget = 1'000'000;

  /// Throws ParameterError.
  void validate() const;
};

/// Doerfler marking: the greedy prefix of cells sorted by descending
/// Theta_K^2 (ties by ascending id) reaching theta_mark of the total.
std::vector<int> mark(const EstimatorReport& report, double theta_mark);

enum class StopReason { Target, Budget, Iterations, ZeroEstimate };
std::string_view to_string(StopReason r);

struct AdaptRecord {
  int iter = 0;
  Mesh mesh;
  RunResult run;
  std::vector<int> marked;  // empty on the last iteration
};

struct AdaptResult {
  std::vector<AdaptRecord> records;
  StopReason reason = StopReason::Iterations;
};

using AdaptObserver = std::function<void(const AdaptRecord&)>;

/// SOLVE -> ESTIMATE -> MARK -> REFINE, re-integrating the whole time
/// interval on every mesh. Solver failures are rethrown with the iteration.
AdaptResult adapt_solve(const Mesh& initial, const Problem& problem, const TimeGrid& grid, const AdaptConfig& config,
                        const RunOptions& options = {}, const AdaptObserver& observer = {});

/// Smallest dof count in `records` whose Theta is at most `target`, or -1.
int dofs_to_reach(const std::vector<AdaptRecord>& records, double target);

}  // namespace sbfem
