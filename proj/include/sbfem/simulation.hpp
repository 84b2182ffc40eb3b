#pragma once

#include "sbfem/verify.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace sbfem {

struct RunOptions {
  EstimatorOptions estimator;
  bool keep_history = false;
  // Called after the initial state (n = 0, no report) and after every step
  // with the indicators accumulated so far.
  std::function<void(const DofMap&, int, const SystemState&, const EstimatorReport*)> on_step;
};

struct RunResult {
  int dofs = 0;   // free unknowns of the coupled system
  int cells = 0;
  double h = 0;
  EstimatorReport estimate;
  std::optional<ErrorReport> errors;  // only with a closed-form solution
  std::vector<SystemState> history;   // t_0 .. t_N when requested
  SystemState final_state;
  double max_residual = 0;
  double wall_ms = 0;
};

/// Backward-Euler integration over the whole grid on a fixed mesh, with the
/// estimator and (when available) the error norms accumulated on the fly.
RunResult run_problem(const Mesh& mesh, const Problem& problem, const TimeGrid& grid, const RunOptions& options = {});

struct StudyConfig {
  RectangleConfig base;                // level 0 when no mesh is given
  std::optional<Mesh> base_mesh;       // refined uniformly per level instead
  int levels = 4;
  double T = 0.1;
  double dt0 = 0;                      // level-0 step; 0 means T / 4
  EstimatorOptions estimator;
};

struct StudyRow {
  int level = 0;
  double h = 0;
  double dt = 0;
  int dofs = 0;
  int cells = 0;
  std::array<double, kErrorComponentCount> err{};
  double combined = 0;
  double theta = 0;
  double zeta = 0;
  double effectivity = 0;   // Theta / error
  double reliability = 0;   // error / (Theta + zeta)
  double efficiency = 0;    // max_K Theta_K / (patch error + patch zeta)
};

struct StudyResult {
  std::vector<StudyRow> rows;
  // rates[l] compares rows l and l + 1; the last slot is the combined norm.
  std::vector<std::array<double, kErrorComponentCount + 1>> rates;
  bool nested = true;
  bool undefined_rates = false;  // some rate came out NaN
};

/// Uniform refinement sweep with dt_l = dt0 / 4^l. Throws ParameterError
/// with fewer than 3 levels or without a closed-form solution.
StudyResult convergence_study(const Problem& problem, const StudyConfig& config);

struct Spread {
  double min = 0;
  double max = 0;
  double ratio() const;  // max / min, NaN when undefined
};

struct EffectivitySummary {
  Spread effectivity, reliability, efficiency;
  double combined_rate = 0;  // least-squares slope of log error against log h
  bool undefined = false;
};

EffectivitySummary effectivity_study(const StudyResult& study);

}  // namespace sbfem
