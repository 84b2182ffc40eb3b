// sbfem: batch driver for the coupled Stokes / Biot solver and its estimator.
#include "sbfem/mesh_io.hpp"
#include "sbfem/output.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace sbfem;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;
constexpr int kExitIo = 4;

struct RunConfig {
  std::string case_name = "builtin-smooth";
  std::string mesh_path;
  int nx = 8;
  int ny = 8;
  std::string params_path;
  double T = 0.1;
  double dt = 0.01;
  int levels = 4;
  double dt0 = 0;
  double theta_mark = 0.5;
  int max_iters = 6;
  double target_theta = 0;
  int dof_budget = 1'000'000;
  bool compare_uniform = false;
  std::string out = "out";
  int threads = 1;
  int vtk_every = 1;
  bool no_timing = false;
  bool porous_jump_uses_mu_p = false;
  bool strict_printed_signs = false;
  int refine = 0;
  std::string format = "sbmesh";
};

bool parse_bool(std::string_view v) {
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw ParameterError("expected a boolean, got '" + std::string(v) + "'");
}

template <typename T>
T parse_number(std::string_view key, std::string_view v) {
  std::istringstream in{std::string(v)};
  T x{};
  if (!(in >> x) || !in.eof()) throw ParameterError("bad value for '" + std::string(key) + "': '" + std::string(v) + "'");
  return x;
}

// Run keys first; everything else goes to the physical parameters.
void apply_key(RunConfig& c, ParamsFile& physical, std::string_view key, std::string_view v) {
  const std::string s(v);
  if (key == "case") c.case_name = s;
  else if (key == "params") c.params_path = s;
  else if (key == "mesh") c.mesh_path = s;
  else if (key == "nx") c.nx = parse_number<int>(key, v);
  else if (key == "ny") c.ny = parse_number<int>(key, v);
  else if (key == "levels") c.levels = parse_number<int>(key, v);
  else if (key == "dt0") c.dt0 = parse_number<double>(key, v);
  else if (key == "theta_mark") c.theta_mark = parse_number<double>(key, v);
  else if (key == "max_iters") c.max_iters = parse_number<int>(key, v);
  else if (key == "target_theta") c.target_theta = parse_number<double>(key, v);
  else if (key == "dof_budget") c.dof_budget = parse_number<int>(key, v);
  else if (key == "compare_uniform") c.compare_uniform = parse_bool(v);
  else if (key == "out") c.out = s;
  else if (key == "threads") c.threads = parse_number<int>(key, v);
  else if (key == "vtk_every") c.vtk_every = parse_number<int>(key, v);
  else if (key == "porous_jump_uses_mu_p") c.porous_jump_uses_mu_p = parse_bool(v);
  else if (key == "strict_printed_signs") c.strict_printed_signs = parse_bool(v);
  else set_param(physical, key, v);
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

std::pair<std::string_view, std::string_view> split_assignment(std::string_view line) {
  const auto eq = line.find('=');
  if (eq == std::string_view::npos) throw ParameterError("expected key=value, got '" + std::string(line) + "'");
  return {trim(line.substr(0, eq)), trim(line.substr(eq + 1))};
}

void apply_config_file(RunConfig& c, ParamsFile& physical, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path);
  std::string line;
  while (std::getline(in, line)) {
    std::string_view l = line;
    if (const auto hash = l.find('#'); hash != std::string_view::npos) l = l.substr(0, hash);
    l = trim(l);
    if (l.empty()) continue;
    const auto [k, v] = split_assignment(l);
    apply_key(c, physical, k, v);
  }
}

// Command-line values land in `cli` and are copied over the file values only
// when the flag was given.
class Options {
 public:
  template <typename T>
  void add(CLI::App* app, const std::string& flag, T RunConfig::*m, const std::string& help) {
    auto* o = app->add_option(flag, cli_.*m, help);
    copy_.push_back({o, [this, m](RunConfig& c) { c.*m = cli_.*m; }});
  }
  void flag(CLI::App* app, const std::string& flag, bool RunConfig::*m, const std::string& help) {
    auto* o = app->add_flag(flag, cli_.*m, help);
    copy_.push_back({o, [this, m](RunConfig& c) { c.*m = cli_.*m; }});
  }

  void common(CLI::App* app) {
    app->add_option("--config", config_path_, "key=value run configuration file");
    app->add_option("--set", overrides_, "key=value override, repeatable");
    params_count_ = app->add_option("--params", cli_.params_path, "key=value physical parameter file");
    add(app, "--case", &RunConfig::case_name, "builtin-smooth | builtin-polynomial | builtin-layer | zero");
    add(app, "--mesh", &RunConfig::mesh_path, "mesh file (.sbmesh or Gmsh 2.2 .msh)");
    add(app, "--nx", &RunConfig::nx, "cells along x of the builtin rectangle");
    add(app, "--ny", &RunConfig::ny, "cells along y of the builtin rectangle");
    add(app, "--out", &RunConfig::out, "output directory");
    add(app, "--threads", &RunConfig::threads, "worker cap");
    flag(app, "--porous-jump-uses-mu-p", &RunConfig::porous_jump_uses_mu_p, "porous stress jump with mu_p");
    flag(app, "--strict-printed-signs", &RunConfig::strict_printed_signs, "+div u_p in the porous mass residual");
  }

  void time(CLI::App* app) {
    add(app, "--T", &RunConfig::T, "final time");
    add(app, "--dt", &RunConfig::dt, "time step");
  }

  // Precedence, lowest first: defaults, parameter file, config file, --set,
  // explicit flags.
  RunConfig resolve(ParamsFile& physical) const {
    RunConfig c;
    if (!config_path_.empty()) {
      ParamsFile ignored;
      apply_config_file(c, ignored, config_path_);
    }
    std::string params_path = c.params_path;
    for (const auto& s : overrides_)
      if (split_assignment(s).first == "params") params_path = std::string(split_assignment(s).second);
    if (params_count_ && params_count_->count() > 0) params_path = cli_.params_path;
    if (!params_path.empty()) physical = read_params_file(params_path);
    if (!config_path_.empty()) apply_config_file(c, physical, config_path_);
    for (const auto& s : overrides_) {
      const auto [k, v] = split_assignment(s);
      if (k == "params") continue;
      apply_key(c, physical, k, v);
    }
    if (physical.T) c.T = *physical.T;
    if (physical.dt) c.dt = *physical.dt;
    for (const auto& [opt, copy] : copy_)
      if (opt->count() > 0) copy(c);
    c.params_path = params_path;
    physical.physical.validate();
    if (c.threads < 1) throw ParameterError("--threads must be at least 1");
    if (c.nx < 1 || c.ny < 2) throw ParameterError("nx must be >= 1 and ny >= 2");
    return c;
  }

 private:
  RunConfig cli_;
  std::string config_path_;
  CLI::Option* params_count_ = nullptr;
  std::vector<std::string> overrides_;
  std::vector<std::pair<CLI::Option*, std::function<void(RunConfig&)>>> copy_;
};

Mesh initial_mesh(const RunConfig& c) {
  if (!c.mesh_path.empty()) return load_mesh(c.mesh_path);
  RectangleConfig rc;
  rc.nx = c.nx;
  rc.ny = c.ny;
  return build_reference_geometry(rc);
}

EstimatorOptions estimator_options(const RunConfig& c) {
  return {c.porous_jump_uses_mu_p, c.strict_printed_signs};
}

std::string prepare_out(const RunConfig& c) {
  std::error_code ec;
  fs::create_directories(c.out, ec);
  if (ec || !fs::is_directory(c.out)) throw IoError("cannot create output directory " + c.out);
  return c.out;
}

std::string numbered(const std::string& dir, const char* stem, int n, const char* ext) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s_%04d.%s", stem, n, ext);
  return (fs::path(dir) / buf).string();
}

void print_summary(const RunResult& run) {
  std::cout << "dofs " << run.dofs << "  cells " << run.cells << "  h " << format_number(run.h) << '\n'
            << "theta " << format_number(run.estimate.theta) << "  zeta " << format_number(run.estimate.zeta) << '\n';
  if (run.errors) {
    for (int c = 0; c < kErrorComponentCount; ++c)
      std::cout << error_name(c) << ' ' << format_number(run.errors->norm[c]) << '\n';
    std::cout << "combined " << format_number(run.errors->combined) << "  effectivity "
              << format_number(run.errors->effectivity) << '\n';
  }
}

int cmd_run(const RunConfig& c, const ParamsFile& physical) {
  const Problem problem = builtin_problem(c.case_name, physical.physical);
  const Mesh mesh = initial_mesh(c);
  const auto grid = TimeGrid::make(c.T, c.dt);
  const std::string dir = prepare_out(c);
  RunOptions options;
  options.estimator = estimator_options(c);
  if (c.vtk_every > 0) {
    options.on_step = [&](const DofMap& dofs, int n, const SystemState& state, const EstimatorReport* report) {
      if (n % c.vtk_every != 0 && n != grid.steps) return;
      write_file(numbered(dir, "solution", n, "vtk"), [&](std::ostream& o) { write_vtk(o, dofs, state, report); });
    };
  }
  AdaptRecord record;
  record.mesh = mesh;
  record.run = run_problem(mesh, problem, grid, options);
  const auto& run = record.run;
  write_file((fs::path(dir) / "indicators.csv").string(),
             [&](std::ostream& o) { write_indicator_csv(o, run.estimate); });
  if (run.errors)
    write_file((fs::path(dir) / "errors.csv").string(),
               [&](std::ostream& o) { write_error_csv(o, *run.errors, run.estimate); });
  write_file((fs::path(dir) / "run.jsonl").string(),
             [&](std::ostream& o) { o << adapt_log_line(record, !c.no_timing) << '\n'; });
  print_summary(run);
  return 0;
}

int cmd_convergence(const RunConfig& c, const ParamsFile& physical) {
  const Problem problem = builtin_problem(c.case_name, physical.physical);
  StudyConfig sc;
  sc.base.nx = c.nx;
  sc.base.ny = c.ny;
  if (!c.mesh_path.empty()) sc.base_mesh = load_mesh(c.mesh_path);
  sc.levels = c.levels;
  sc.T = c.T;
  sc.dt0 = c.dt0;
  sc.estimator = estimator_options(c);
  const std::string dir = prepare_out(c);
  const auto study = convergence_study(problem, sc);
  const auto summary = effectivity_study(study);
  write_file((fs::path(dir) / "convergence.csv").string(), [&](std::ostream& o) { write_convergence_csv(o, study); });
  write_file((fs::path(dir) / "effectivity.csv").string(), [&](std::ostream& o) { write_effectivity_csv(o, study); });
  write_convergence_csv(std::cout, study);
  std::cout << "combined rate " << format_number(summary.combined_rate) << '\n'
            << "effectivity spread " << format_number(summary.effectivity.ratio()) << '\n'
            << "reliability spread " << format_number(summary.reliability.ratio()) << '\n'
            << "efficiency spread " << format_number(summary.efficiency.ratio()) << '\n';
  if (study.undefined_rates || summary.undefined) std::cout << "warning: undefined rates or ratios (nan)\n";
  return 0;
}

int cmd_adapt(const RunConfig& c, const ParamsFile& physical) {
  const Problem problem = builtin_problem(c.case_name, physical.physical);
  const Mesh mesh = initial_mesh(c);
  const auto grid = TimeGrid::make(c.T, c.dt);
  AdaptConfig ac;
  ac.theta_mark = c.theta_mark;
  ac.max_iters = c.max_iters;
  ac.target_theta = c.target_theta;
  ac.dof_budget = c.dof_budget;
  const std::string dir = prepare_out(c);
  RunOptions options;
  options.estimator = estimator_options(c);

  auto log = open_output((fs::path(dir) / "adapt.jsonl").string());
  const auto result = adapt_solve(mesh, problem, grid, ac, options, [&](const AdaptRecord& r) {
    log << adapt_log_line(r, !c.no_timing) << '\n';
    write_file(numbered(dir, "indicators_iter", r.iter, "csv"),
               [&](std::ostream& o) { write_indicator_csv(o, r.run.estimate); });
    std::cout << "iter " << r.iter << "  dofs " << r.run.dofs << "  cells " << r.run.cells << "  theta "
              << format_number(r.run.estimate.theta) << '\n';
  });
  log.flush();
  if (!log) throw IoError("failed writing adapt.jsonl");

  const auto& last = result.records.back();
  const DofMap dofs(last.mesh);
  write_file((fs::path(dir) / "solution_final.vtk").string(),
             [&](std::ostream& o) { write_vtk(o, dofs, last.run.final_state, &last.run.estimate); });
  write_file((fs::path(dir) / "mesh_final.sbmesh").string(), [&](std::ostream& o) { write_mesh_text(o, last.mesh); });
  std::cout << "stopped: " << to_string(result.reason) << '\n';

  if (c.compare_uniform) {
    const double target = last.run.estimate.theta;
    auto ulog = open_output((fs::path(dir) / "uniform.jsonl").string());
    Mesh m = mesh;
    int reached = -1;
    for (int iter = 0;; ++iter) {
      AdaptRecord r;
      r.iter = iter;
      r.run = run_problem(m, problem, grid, options);
      ulog << adapt_log_line(r, !c.no_timing) << '\n';
      if (r.run.estimate.theta <= target) {
        reached = r.run.dofs;
        break;
      }
      if (r.run.dofs > 16 * last.run.dofs || r.run.dofs > c.dof_budget) break;
      m = refine_uniform(m);
    }
    if (reached > 0) {
      std::cout << "uniform dofs to reach theta " << format_number(target) << ": " << reached << "  adaptive: "
                << last.run.dofs << "  ratio " << format_number(double(last.run.dofs) / reached) << '\n';
    } else {
      std::cout << "uniform refinement did not reach theta " << format_number(target) << " within the budget\n";
    }
  }
  return 0;
}

int cmd_export(const RunConfig& c) {
  Mesh mesh = initial_mesh(c);
  for (int k = 0; k < c.refine; ++k) mesh = refine_uniform(mesh);
  const auto audit = audit_conformity(mesh);
  if (!audit.ok) throw GeometryError("exported mesh fails the conformity audit: " + audit.message);
  if (c.format != "sbmesh" && c.format != "vtk") throw ParameterError("unknown format '" + c.format + "'");
  write_file(c.out, [&](std::ostream& o) {
    if (c.format == "vtk") write_mesh_vtk(o, mesh);
    else write_mesh_text(o, mesh);
  });
  std::cout << "vertices " << mesh.n_vertices() << "  cells " << mesh.n_cells() << "  edges " << mesh.n_edges()
            << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive coupled Stokes / Biot solver"};
  app.require_subcommand(1);

  Options run_opts, conv_opts, adapt_opts, export_opts;
  auto* run = app.add_subcommand("run", "solve one case and write indicators, errors and VTK");
  run_opts.common(run);
  run_opts.time(run);
  run_opts.add(run, "--vtk-every", &RunConfig::vtk_every, "VTK output stride in steps, 0 disables");
  run_opts.flag(run, "--no-timing", &RunConfig::no_timing, "write wall_ms as 0");

  auto* conv = app.add_subcommand("convergence-study", "uniform refinement sweep with dt ~ h^2");
  conv_opts.common(conv);
  conv_opts.add(conv, "--T", &RunConfig::T, "final time");
  conv_opts.add(conv, "--levels", &RunConfig::levels, "number of meshes");
  conv_opts.add(conv, "--dt0", &RunConfig::dt0, "time step on the coarsest mesh (default T/4)");

  auto* adapt = app.add_subcommand("adapt-study", "SOLVE-ESTIMATE-MARK-REFINE loop");
  adapt_opts.common(adapt);
  adapt_opts.time(adapt);
  adapt_opts.add(adapt, "--theta-mark", &RunConfig::theta_mark, "Doerfler fraction in (0, 1]");
  adapt_opts.add(adapt, "--max-iters", &RunConfig::max_iters, "iteration cap");
  adapt_opts.add(adapt, "--target-theta", &RunConfig::target_theta, "stop once theta is at most this");
  adapt_opts.add(adapt, "--dof-budget", &RunConfig::dof_budget, "stop once the dof count reaches this");
  adapt_opts.flag(adapt, "--compare-uniform", &RunConfig::compare_uniform, "also refine uniformly to the final theta");
  adapt_opts.flag(adapt, "--no-timing", &RunConfig::no_timing, "write wall_ms as 0");

  auto* exp = app.add_subcommand("export-mesh", "write the (refined) mesh");
  export_opts.common(exp);
  export_opts.add(exp, "--refine", &RunConfig::refine, "uniform refinements before export");
  export_opts.add(exp, "--format", &RunConfig::format, "sbmesh | vtk");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    ParamsFile physical;
    if (*run) return cmd_run(run_opts.resolve(physical), physical);
    if (*conv) return cmd_convergence(conv_opts.resolve(physical), physical);
    if (*adapt) return cmd_adapt(adapt_opts.resolve(physical), physical);
    if (*exp) return cmd_export(export_opts.resolve(physical));
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kExitIo;
  } catch (const SolverError& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return kExitSolver;
  } catch (const ParameterError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DomainError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const GeometryError& e) {
    std::cerr << "mesh error: " << e.what() << '\n';
    return kExitConfig;
  }
  return 1;
}
