#include "sbfem/adapt.hpp"

#include <algorithm>
#include <numeric>

namespace sbfem {

void AdaptConfig::validate() const {
  if (!(theta_mark > 0 && theta_mark <= 1)) throw ParameterError("theta_mark must lie in (0, 1]");
  if (max_iters < 1) throw ParameterError("max_iters must be positive");
  if (!(target_theta >= 0)) throw ParameterError("target theta must be non-negative");
  if (dof_budget < 1) throw ParameterError("dof budget must be positive");
}

std::vector<int> mark(const EstimatorReport& report, double theta_mark) {
  const auto& cells = report.cells;
  std::vector<int> order(cells.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return cells[a].theta2() > cells[b].theta2(); });
  double total = 0;
  for (int k : order) total += cells[k].theta2();

  std::vector<int> marked;
  double sum = 0;
  for (int k : order) {
    if (sum >= theta_mark * total || !(cells[k].theta2() > 0)) break;
    sum += cells[k].theta2();
    marked.push_back(cells[k].cell);
  }
  return marked;
}

std::string_view to_string(StopReason r) {
  switch (r) {
    case StopReason::Target: return "target";
    case StopReason::Budget: return "budget";
    case StopReason::Iterations: return "iterations";
    case StopReason::ZeroEstimate: return "zero-estimate";
  }
  return "?";
}

AdaptResult adapt_solve(const Mesh& initial, const Problem& problem, const TimeGrid& grid, const AdaptConfig& config,
                        const RunOptions& options, const AdaptObserver& observer) {
  config.validate();
  AdaptResult out;
  Mesh mesh = initial;
  for (int iter = 0;; ++iter) {
    AdaptRecord rec;
    rec.iter = iter;
    rec.mesh = mesh;
    try {
      rec.run = run_problem(mesh, problem, grid, options);
    } catch (const SolverError& e) {
      throw SolverError("adapt iteration " + std::to_string(iter) + ": " + e.what());
    }
    const double theta = rec.run.estimate.theta;
    bool stop = true;
    if (!(theta > 0)) {
      out.reason = StopReason::ZeroEstimate;
    } else if (theta <= config.target_theta) {
      out.reason = StopReason::Target;
    } else if (rec.run.dofs >= config.dof_budget) {
      out.reason = StopReason::Budget;
    } else if (iter + 1 >= config.max_iters) {
      out.reason = StopReason::Iterations;
    } else {
      stop = false;
      rec.marked = mark(rec.run.estimate, config.theta_mark);
      mesh = refine(mesh, rec.marked).mesh;
    }
    if (observer) observer(rec);
    out.records.push_back(std::move(rec));
    if (stop) break;
  }
  return out;
}

int dofs_to_reach(const std::vector<AdaptRecord>& records, double target) {
  int best = -1;
  for (const auto& r : records) {
    if (r.run.estimate.theta <= target && (best < 0 || r.run.dofs < best)) best = r.run.dofs;
  }
  return best;
}

}  // namespace sbfem
