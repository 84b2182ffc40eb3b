#include "sbfem/simulation.hpp"

#include "sbfem/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

namespace sbfem {

RunResult run_problem(const Mesh& mesh, const Problem& problem, const TimeGrid& grid, const RunOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  problem.params.validate();
  const DofMap dofs(mesh);
  const StepAssembler assembler(dofs, problem.params, grid.dt);
  const SparseDirectSolver lu(assembler.reduced_matrix());

  RunResult out;
  out.dofs = dofs.n_free();
  out.cells = mesh.n_cells();
  out.h = mesh.h_max();

  EstimatorAccumulator estimator(dofs, problem.params, options.estimator);
  std::optional<ErrorAccumulator> errors;
  if (problem.exact) errors.emplace(dofs, problem.exact);

  SystemState state = apply_initial_conditions(problem.data, dofs, problem.exact.get());
  state.t = 0;
  if (options.keep_history) out.history.push_back(state);
  if (options.on_step) options.on_step(dofs, 0, state, nullptr);

  for (int n = 1; n <= grid.steps; ++n) {
    const double t = grid.time(n);
    const auto system = assembler.system(problem.data, state, t);
    SolveReport report;
    VecX x;
    try {
      x = lu.solve(system.rhs, &report);
    } catch (const SolverError& e) {
      throw SolverError("step " + std::to_string(n) + ": " + e.what());
    }
    out.max_residual = std::max(out.max_residual, report.residual);
    SystemState next = assembler.expand(x, problem.data, t);
    estimator.add_step(problem.data, next, state, grid.dt);
    if (errors) errors->add_step(next, grid.dt);
    if (options.keep_history) out.history.push_back(next);
    if (options.on_step) {
      const auto so_far = estimator.report();
      options.on_step(dofs, n, next, &so_far);
    }
    state = std::move(next);
  }

  out.estimate = estimator.report();
  if (errors) out.errors = errors->report(out.estimate.theta);
  out.final_state = std::move(state);
  out.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return out;
}

StudyResult convergence_study(const Problem& problem, const StudyConfig& config) {
  if (config.levels < 3) throw ParameterError("a convergence study needs at least 3 levels");
  if (!problem.exact) throw ParameterError("case '" + problem.name + "' has no closed-form solution");
  const double dt0 = config.dt0 > 0 ? config.dt0 : config.T / 4;

  StudyResult study;
  Mesh mesh;
  if (config.base_mesh) mesh = *config.base_mesh;
  for (int l = 0; l < config.levels; ++l) {
    if (!config.base_mesh) {
      RectangleConfig rc = config.base;
      rc.nx = config.base.nx << l;
      rc.ny = config.base.ny << l;
      mesh = build_reference_geometry(rc);
    } else if (l > 0) {
      mesh = refine_uniform(mesh);
    }
    const auto grid = TimeGrid::make(config.T, dt0 / std::pow(4.0, l));
    RunOptions options;
    options.estimator = config.estimator;
    const auto run = run_problem(mesh, problem, grid, options);

    StudyRow row;
    row.level = l;
    row.h = run.h;
    row.dt = grid.dt;
    row.dofs = run.dofs;
    row.cells = run.cells;
    row.err = run.errors->norm;
    row.combined = run.errors->combined;
    row.theta = run.estimate.theta;
    row.zeta = run.estimate.zeta;
    row.effectivity = run.errors->effectivity;
    const double bound = row.theta + row.zeta;
    row.reliability = bound > 0 ? row.combined / bound : std::numeric_limits<double>::quiet_NaN();
    row.efficiency = efficiency_ratio(mesh, run.estimate, *run.errors);
    study.rows.push_back(row);
  }

  for (std::size_t l = 0; l + 1 < study.rows.size(); ++l) {
    const auto& a = study.rows[l];
    const auto& b = study.rows[l + 1];
    std::array<double, kErrorComponentCount + 1> r{};
    for (int c = 0; c < kErrorComponentCount; ++c) r[c] = observed_rate(a.err[c], b.err[c], a.h, b.h);
    r[kErrorComponentCount] = observed_rate(a.combined, b.combined, a.h, b.h);
    for (double v : r) study.undefined_rates |= std::isnan(v);
    study.rates.push_back(r);
  }
  return study;
}

double Spread::ratio() const {
  if (!(min > 0) || !std::isfinite(max)) return std::numeric_limits<double>::quiet_NaN();
  return max / min;
}

EffectivitySummary effectivity_study(const StudyResult& study) {
  EffectivitySummary s;
  auto spread = [&](auto member) {
    Spread out{std::numeric_limits<double>::infinity(), 0};
    for (const auto& row : study.rows) {
      const double v = row.*member;
      if (!std::isfinite(v)) {
        s.undefined = true;
        continue;
      }
      out.min = std::min(out.min, v);
      out.max = std::max(out.max, v);
    }
    if (out.max < out.min) out = {std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN()};
    return out;
  };
  s.effectivity = spread(&StudyRow::effectivity);
  s.reliability = spread(&StudyRow::reliability);
  s.efficiency = spread(&StudyRow::efficiency);

  // Slope of log(error) against log(h).
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (const auto& row : study.rows) {
    if (!(row.combined > 0) || !(row.h > 0)) continue;
    const double x = std::log(row.h), y = std::log(row.combined);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  const double den = n * sxx - sx * sx;
  if (n >= 2 && den > 0) {
    s.combined_rate = (n * sxy - sx * sy) / den;
  } else {
    s.combined_rate = std::numeric_limits<double>::quiet_NaN();
    s.undefined = true;
  }
  return s;
}

}  // namespace sbfem
