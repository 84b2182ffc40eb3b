// One PASS/FAIL line per acceptance criterion. The oracle criterion runs the
// block and estimator oracle suites linked into this binary.
#define DOCTEST_CONFIG_IMPLEMENT
#include "doctest.h"
#include "oracle.hpp"

#include "sbfem/adapt.hpp"

#include <chrono>
#include <cstdio>
#include <numeric>
#include <string>

using namespace sbfem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

int failures = 0;

void report(int id, const char* name, bool ok, const std::string& detail) {
  std::printf("%s criterion %d %s: %s\n", ok ? "PASS" : "FAIL", id, name, detail.c_str());
  std::fflush(stdout);
  failures += !ok;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Mesh square(int n) {
  RectangleConfig rc;
  rc.nx = rc.ny = n;
  return build_reference_geometry(rc);
}

double field_scale(const Mesh& mesh, const ManufacturedCase& exact, double t) {
  const DofMap dofs(mesh);
  SystemState zero{t, VecX::Zero(dofs.total())};
  const auto s = spatial_errors(dofs, zero, exact);
  return std::sqrt(std::accumulate(s.total.begin(), s.total.end(), 0.0));
}

void consistency() {
  const auto t0 = Clock::now();
  const auto problem = builtin_problem("builtin-polynomial");
  const auto grid = TimeGrid::make(0.1, 0.025);
  Mesh mesh = square(2);
  double worst = 0;
  for (int level = 0; level < 2; ++level) {
    const auto run = run_problem(mesh, problem, grid);
    worst = std::max(worst, run.estimate.theta / field_scale(mesh, *problem.exact, grid.T));
    mesh = refine_uniform(mesh);
  }
  const double secs = seconds_since(t0);
  report(1, "consistency", worst <= 1e-8 && secs < 10,
         fmt("max Theta / field scale = %.3e (limit 1e-8), %.2f s (limit 10 s)", worst, secs));
}

void convergence() {
  const auto t0 = Clock::now();
  StudyConfig cfg;
  cfg.base.nx = cfg.base.ny = 4;
  cfg.levels = 4;
  cfg.T = 0.1;
  const auto study = convergence_study(builtin_problem("builtin-smooth"), cfg);
  const auto s = effectivity_study(study);
  const double secs = seconds_since(t0);
  std::string rates;
  for (const auto& r : study.rates) rates += fmt(" %.3f", r[kErrorComponentCount]);
  report(2, "a priori rate", s.combined_rate >= 0.9 && !s.undefined && secs < 300,
         fmt("least-squares combined rate %.3f (limit 0.9), pairwise%s, dt ~ h^2, %.1f s (limit 300 s)",
             s.combined_rate, rates.c_str(), secs));
  const double rel = s.reliability.ratio();
  report(3, "reliability", rel < 3 && secs < 300,
         fmt("error/(Theta+zeta) in [%.4f, %.4f], spread %.3f (limit 3)", s.reliability.min, s.reliability.max,
             rel));
  const double eff = s.efficiency.ratio();
  report(4, "efficiency", eff < 3,
         fmt("max_K Theta_K/(patch error + zeta) in [%.3f, %.3f], spread %.3f (limit 3)", s.efficiency.min,
             s.efficiency.max, eff));
}

void oracles(int argc, char** argv) {
  const auto t0 = Clock::now();
  doctest::Context ctx(argc, argv);
  ctx.setOption("minimal", true);
  const int rc = ctx.run();
  const double secs = seconds_since(t0);
  report(5, "oracle equivalence", rc == 0 && secs < 60,
         fmt("block and estimator oracle suites %s at 1e-10 relative, %.2f s (limit 60 s)",
             rc == 0 ? "agree" : "disagree", secs));
}

void adaptivity(std::vector<Mesh>& refined) {
  const auto t0 = Clock::now();
  const auto problem = builtin_problem("builtin-layer");
  const auto grid = TimeGrid::make(0.02, 0.01);
  const auto uniform = run_problem(square(32), problem, grid);
  AdaptConfig cfg;
  cfg.theta_mark = 0.5;
  cfg.max_iters = 20;
  cfg.target_theta = uniform.estimate.theta;
  const auto r = adapt_solve(square(4), problem, grid, cfg);
  for (const auto& rec : r.records) refined.push_back(rec.mesh);
  const int dofs = dofs_to_reach(r.records, cfg.target_theta);
  const double ratio = dofs > 0 ? double(dofs) / uniform.dofs : INFINITY;
  const double secs = seconds_since(t0);
  report(6, "adaptivity", ratio <= 0.6 && secs < 300,
         fmt("Theta %.4g reached with %d adaptive dofs vs %d uniform (ratio %.3f, limit 0.6), %.1f s", cfg.target_theta,
             dofs, uniform.dofs, ratio, secs));
}

Problem scaled(const Problem& p, double c) {
  Problem q = p;
  q.exact = nullptr;
  auto& d = q.data;
  const auto v = [c](VectorFn f) { return VectorFn([f, c](const Vec2& x, double t) { return Vec2(c * f(x, t)); }); };
  const auto s = [c](ScalarFn f) { return ScalarFn([f, c](const Vec2& x, double t) { return c * f(x, t); }); };
  const auto is = [c](InterfaceScalarFn f) {
    return InterfaceScalarFn([f, c](const Vec2& x, double t, const Vec2& n) { return c * f(x, t, n); });
  };
  d.f_f = v(d.f_f), d.f_p = v(d.f_p), d.u_f_boundary = v(d.u_f_boundary), d.eta_boundary = v(d.eta_boundary);
  d.u_p_boundary = v(d.u_p_boundary), d.eta0 = v(d.eta0);
  d.q_f = s(d.q_f), d.q_p = s(d.q_p), d.p_p_boundary = s(d.p_p_boundary), d.p_p0 = s(d.p_p0);
  d.g1 = is(d.g1), d.g2 = is(d.g2), d.g4 = is(d.g4);
  d.g3 = [f = d.g3, c](const Vec2& x, double t, const Vec2& n) { return Vec2(c * f(x, t, n)); };
  return q;
}

// Same triangulation with permuted vertex ids, reversed cell order and
// rotated local vertex order: every edge and cell orientation changes.
Mesh renumbered(const Mesh& m, std::vector<int>& cell_map) {
  const int nv = m.n_vertices(), nc = m.n_cells();
  std::vector<int> perm(nv);
  std::iota(perm.begin(), perm.end(), 0);
  std::mt19937 rng(5);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<Vec2> verts(nv);
  for (int v = 0; v < nv; ++v) verts[perm[v]] = m.vertex(v);
  std::vector<Cell> cells;
  cell_map.assign(nc, -1);
  for (int c = nc - 1; c >= 0; --c) {
    const auto& v = m.cell(c).v;
    const int r = c % 3;
    cells.push_back({{perm[v[r]], perm[v[(r + 1) % 3]], perm[v[(r + 2) % 3]]}, m.subdomain(c)});
    cell_map[c] = nc - 1 - c;
  }
  std::map<EdgeKey, EdgeTag> tags;
  for (const auto& [k, t] : m.boundary_tags()) tags[make_edge_key(perm[k.first], perm[k.second])] = t;
  return Mesh(verts, cells, tags);
}

void invariants(const std::vector<Mesh>& adaptive_meshes) {
  const auto t0 = Clock::now();
  const auto grid = TimeGrid::make(0.02, 0.01);
  std::vector<std::string> bad;

  RunOptions keep;
  keep.keep_history = true;
  const auto zero = run_problem(oracle::jittered(3, 4, 1), builtin_problem("zero"), grid, keep);
  bool zero_ok = zero.estimate.theta == 0 && zero.estimate.zeta == 0;
  for (const auto& s : zero.history) zero_ok = zero_ok && s.values.lpNorm<Eigen::Infinity>() == 0;
  if (!zero_ok) bad.push_back("zero data");

  const Mesh mesh = oracle::jittered(3, 4, 2);
  const auto smooth = builtin_problem("builtin-smooth", oracle::random_params(3));
  const auto base = run_problem(mesh, smooth, grid);
  double lin = 0;
  for (double c : {2.0, -3.0, 0.25}) {
    const auto r = run_problem(mesh, scaled(smooth, c), grid);
    lin = std::max(lin, oracle::rel_diff(r.estimate.theta, std::abs(c) * base.estimate.theta));
    lin = std::max(lin, oracle::rel_diff(r.estimate.zeta, std::abs(c) * base.estimate.zeta));
  }
  if (lin > 1e-10) bad.push_back("scaling");

  std::vector<int> map;
  const Mesh flipped = renumbered(mesh, map);
  const auto other = run_problem(flipped, smooth, grid);
  double orient = 0;
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const auto& a = base.estimate.cells[c];
    const auto& b = other.estimate.cells[map[c]];
    for (auto m : {&ElementIndicator::theta_f2, &ElementIndicator::theta_p2, &ElementIndicator::theta_pf2,
                   &ElementIndicator::zeta2})
      orient = std::max(orient, std::abs(a.*m - b.*m) / std::max(base.estimate.theta * base.estimate.theta, 1e-300));
  }
  if (orient > 1e-10) bad.push_back("orientation");

  int audits = 0, audit_failures = 0;
  auto audit = [&](const Mesh& m) {
    ++audits;
    audit_failures += !audit_conformity(m).ok;
  };
  Mesh m = square(4);
  std::mt19937 rng(9);
  for (int round = 0; round < 10; ++round) {
    std::vector<int> marked;
    std::bernoulli_distribution pick(0.15);
    for (int c = 0; c < m.n_cells(); ++c)
      if (pick(rng)) marked.push_back(c);
    m = refine(m, marked).mesh;
    audit(m);
  }
  audit(refine_uniform(m));
  for (const auto& am : adaptive_meshes) audit(am);
  if (audit_failures) bad.push_back("conformity");

  std::string which;
  for (const auto& b : bad) which += " " + b;
  const double secs = seconds_since(t0);
  report(7, "invariants", bad.empty(),
         fmt("zero data %s, scaling deviation %.2e, orientation deviation %.2e, %d/%d conformity audits ok, %.1f s%s%s",
             zero_ok ? "ok" : "bad", lin, orient, audits - audit_failures, audits, secs, bad.empty() ? "" : "; failed:",
             which.c_str()));
}

}  // namespace

int main(int argc, char** argv) {
  try {
    consistency();
    convergence();
    oracles(argc, argv);
    std::vector<Mesh> adaptive_meshes;
    adaptivity(adaptive_meshes);
    invariants(adaptive_meshes);
  } catch (const std::exception& e) {
    std::printf("FAIL acceptance aborted: %s\n", e.what());
    return 1;
  }
  return failures ? 1 : 0;
}
