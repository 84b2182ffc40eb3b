#include "doctest.h"
#include "oracle.hpp"

#include "sbfem/estimator.hpp"

using namespace sbfem;

namespace {

// Polynomial fields of degree <= 4 so every data function is a polynomial of
// degree <= 3 and all library quadratures are exact on the compared terms.
ManufacturedCase cubic_case(const PhysicalParams& params) {
  const auto P = [](std::vector<double> c) { return Profile::polynomial(std::move(c)); };
  const auto T = P({1, 0.5});
  SpaceTimeField u1{{1, P({0, 0, 0, 1}), P({1}), T}, {0.5, P({0, 1}), P({0, 0, 1}), T}};
  SpaceTimeField u2{{-1, P({0, 0, 1}), P({0, 1}), T}, {0.3, P({1}), P({0, 0, 0, 1}), T}};
  SpaceTimeField pf{{1, P({0, 0, 1}), P({0, 1}), T}, {-0.7, P({1}), P({0, 0, 0, 1}), T}};
  SpaceTimeField pp{{0.4, P({0, 0, 1}), P({0, 1}), T}, {0.2, P({1}), P({0, 0, 0, 1}), T}};
  SpaceTimeField e1{{0.1, P({0, 0, 1}), P({0, 0, 1}), T}, {0.2, P({0, 1}), P({1}), T}};
  SpaceTimeField e2{{-0.2, P({0, 0, 0, 1}), P({0, 1}), T}, {0.1, P({1}), P({0, 0, 1}), T}};
  return ManufacturedCase("cubic", params, u1, u2, pf, pp, e1, e2);
}

struct Fixture {
  Mesh mesh;
  PhysicalParams params;
  std::unique_ptr<DofMap> dofs;
  ManufacturedCase exact;
  ProblemData data;
  SystemState current, previous;
  double dt = 0.1;

  explicit Fixture(unsigned seed)
      : mesh(oracle::jittered(2, 2, seed)), params(oracle::random_params(seed)), exact(cubic_case(params)) {
    dofs = std::make_unique<DofMap>(mesh);
    data = exact.data();
    current = {0.3, oracle::random_vector(dofs->total(), seed + 100)};
    previous = {0.2, oracle::random_vector(dofs->total(), seed + 200)};
  }
};

Vec2 mean_f(const Fixture& fx, int c, double t) {
  Vec2 s = Vec2::Zero();
  double a = 0;
  for (const auto& q : oracle::duffy(fx.mesh, c)) {
    s += q.w * fx.data.f_f(q.x, t);
    a += q.w;
  }
  return s / a;
}

double mean_q(const Fixture& fx, int c, double t) {
  double s = 0, a = 0;
  for (const auto& q : oracle::duffy(fx.mesh, c)) {
    s += q.w * fx.data.q_f(q.x, t);
    a += q.w;
  }
  return s / a;
}

// L2 projection onto P1 from the normal equations; returns nodal values of
// (f_x, f_y, q) at the cell vertices.
Eigen::Matrix3d project_p1(const Fixture& fx, int c, double t) {
  const oracle::Lagrange L(oracle::p1_nodes(fx.mesh, c), 1);
  Eigen::Matrix3d G = Eigen::Matrix3d::Zero(), rhs = Eigen::Matrix3d::Zero();
  for (const auto& q : oracle::duffy(fx.mesh, c)) {
    const Vec2 f = fx.data.f_p(q.x, t);
    const double s = fx.data.q_p(q.x, t);
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) G(i, j) += q.w * L.value(i, q.x) * L.value(j, q.x);
      rhs(i, 0) += q.w * L.value(i, q.x) * f.x();
      rhs(i, 1) += q.w * L.value(i, q.x) * f.y();
      rhs(i, 2) += q.w * L.value(i, q.x) * s;
    }
  }
  return G.lu().solve(rhs);
}

double area(const Mesh& mesh, int c) {
  double a = 0;
  for (const auto& q : oracle::duffy(mesh, c, 2)) a += q.w;
  return a;
}

Vec2 outward_from(const Mesh& mesh, int e, int cell) {
  Vec2 n = oracle::global_normal(mesh, e);
  Vec2 centroid = Vec2::Zero();
  for (int v : mesh.cell(cell).v) centroid += mesh.vertex(v) / 3.0;
  if (n.dot(mesh.vertex(mesh.edge(e).v[0]) - centroid) < 0) n = -n;
  return n;
}

Mat2 oracle_jump_stress(const Fixture& fx, const VecX& values, int cell, const Vec2& x, double shear) {
  if (fx.mesh.subdomain(cell) == Subdomain::Fluid) return oracle::FluidField(*fx.dofs, values, cell).stress(fx.params.mu, x);
  const oracle::PorousField P(*fx.dofs, values, cell);
  const Mat2 G = P.grad_eta();
  return shear * (G + G.transpose()) - P.p * Mat2::Identity();
}

void check_rel(double lib, double ref, double tol = 1e-10) {
  CHECK(std::abs(lib - ref) <= tol * std::max(std::abs(ref), 1e-14));
}

}  // namespace

TEST_CASE("data projections") {
  const Fixture fx(7);
  for (int c = 0; c < fx.mesh.n_cells(); ++c) {
    CAPTURE(c);
    const auto p = project_cell(fx.data, fx.mesh, c, fx.current.t);
    if (fx.mesh.subdomain(c) == Subdomain::Fluid) {
      CHECK((p.f_mean - mean_f(fx, c, fx.current.t)).norm() <= 1e-10 * std::max(1.0, p.f_mean.norm()));
      check_rel(p.q_mean, mean_q(fx, c, fx.current.t));
    } else {
      const auto ref = project_p1(fx, c, fx.current.t);
      for (int i = 0; i < 3; ++i) {
        CHECK(std::abs(p.f_p1[i].x() - ref(i, 0)) <= 1e-10 * ref.cwiseAbs().maxCoeff());
        CHECK(std::abs(p.f_p1[i].y() - ref(i, 1)) <= 1e-10 * ref.cwiseAbs().maxCoeff());
        CHECK(std::abs(p.q_p1[i] - ref(i, 2)) <= 1e-10 * ref.cwiseAbs().maxCoeff());
      }
    }
  }

  SUBCASE("constant and linear data are reproduced") {
    ProblemData d = zero_data();
    d.f_f = [](const Vec2&, double) { return Vec2(2.0, -3.0); };
    d.f_p = [](const Vec2& x, double) { return Vec2(1 + 2 * x.x(), x.y() - x.x()); };
    d.q_p = [](const Vec2& x, double) { return 3 * x.y(); };
    for (int c = 0; c < fx.mesh.n_cells(); ++c) {
      const auto p = project_cell(d, fx.mesh, c, 0);
      const auto osc = oscillation(d, fx.mesh, p, c, 0);
      if (fx.mesh.subdomain(c) == Subdomain::Fluid) CHECK((p.f_mean - Vec2(2, -3)).norm() < 1e-13);
      CHECK(osc[0] < 1e-26);
      CHECK(osc[1] < 1e-26);
    }
  }
}

TEST_CASE("fluid element residuals match symbolic differentiation") {
  for (unsigned seed : {1u, 2u, 3u}) {
    const Fixture fx(seed);
    for (int c : fx.dofs->fluid_cells()) {
      CAPTURE(seed);
      CAPTURE(c);
      const auto proj = project_cell(fx.data, fx.mesh, c, fx.current.t);
      const auto r = element_residuals_fluid(*fx.dofs, fx.params, fx.current, proj, c);
      const oracle::FluidField F(*fx.dofs, fx.current.values, c);
      const Vec2 mom = mean_f(fx, c, fx.current.t) + F.div_stress(fx.params.mu);
      CHECK((r.momentum - mom).norm() <= 1e-10 * std::max(1.0, mom.norm()));
      check_rel(r.momentum_norm2, area(fx.mesh, c) * mom.squaredNorm());
      double mass = 0;
      const double qK = mean_q(fx, c, fx.current.t);
      for (const auto& q : oracle::duffy(fx.mesh, c)) mass += q.w * std::pow(qK - F.grad(q.x).trace(), 2);
      check_rel(r.mass_norm2, mass);
    }
  }
  SUBCASE("zero state and zero data") {
    const Fixture fx(4);
    const SystemState zero{0, VecX::Zero(fx.dofs->total())};
    const CellProjection proj;
    const auto r = element_residuals_fluid(*fx.dofs, fx.params, zero, proj, fx.dofs->fluid_cells()[0]);
    CHECK(r.momentum_norm2 == 0);
    CHECK(r.mass_norm2 == 0);
  }
  SUBCASE("porous cell is rejected") {
    const Fixture fx(4);
    CHECK_THROWS_AS(element_residuals_fluid(*fx.dofs, fx.params, fx.current, {}, fx.dofs->porous_cells()[0]),
                    DomainError);
  }
}

TEST_CASE("porous element residuals") {
  for (unsigned seed : {1u, 2u, 3u}) {
    for (bool strict : {false, true}) {
      const Fixture fx(seed);
      EstimatorOptions opt;
      opt.strict_printed_signs = strict;
      const Mat2 R = fx.params.mu * fx.params.K.inverse();
      for (int c : fx.dofs->porous_cells()) {
        CAPTURE(seed);
        CAPTURE(c);
        const auto proj = project_cell(fx.data, fx.mesh, c, fx.current.t);
        const auto r = element_residuals_porous(*fx.dofs, fx.params, fx.current, fx.previous, proj, c, fx.dt, opt);
        const oracle::PorousField P(*fx.dofs, fx.current.values, c), P0(*fx.dofs, fx.previous.values, c);
        const oracle::Lagrange L(oracle::p1_nodes(fx.mesh, c), 1);
        const auto proj_ref = project_p1(fx, c, fx.current.t);
        const double rate = (fx.params.s0 * (P.p - P0.p) + fx.params.alpha * (P.grad_eta().trace() - P0.grad_eta().trace())) / fx.dt;
        double force = 0, darcy = 0, mass = 0;
        for (const auto& q : oracle::duffy(fx.mesh, c)) {
          Vec2 f = Vec2::Zero();
          double s = 0;
          for (int i = 0; i < 3; ++i) {
            f += L.value(i, q.x) * Vec2(proj_ref(i, 0), proj_ref(i, 1));
            s += L.value(i, q.x) * proj_ref(i, 2);
          }
          force += q.w * f.squaredNorm();
          darcy += q.w * (R * P.velocity(q.x)).squaredNorm();
          mass += q.w * std::pow(s - rate + (strict ? 1 : -1) * P.div_velocity(), 2);
        }
        check_rel(r.force_norm2, force);
        check_rel(r.darcy_norm2, darcy);
        check_rel(r.mass_norm2, mass);
        // RT0 fields are a + c x, so mu K^-1 u has a symmetric gradient.
        CHECK(std::abs(r.curl) < 1e-9 * std::max(1.0, darcy));
      }
    }
  }
  SUBCASE("backward difference of one pressure dof") {
    const Fixture fx(5);
    const int c = fx.dofs->porous_cells()[1];
    const double delta = 0.3;
    SystemState cur{1, VecX::Zero(fx.dofs->total())}, prev = cur;
    prev.values[fx.dofs->offset(Field::DarcyPressure) + fx.dofs->darcy_pressure_dof(c)] = -delta;
    const auto r = element_residuals_porous(*fx.dofs, fx.params, cur, prev, {}, c, fx.dt);
    const double expected = -fx.params.s0 * delta / fx.dt;
    check_rel(r.mass_norm2, area(fx.mesh, c) * expected * expected);
  }
  SUBCASE("single RT0 basis with K = I, mu = 1") {
    Fixture fx(6);
    fx.params = PhysicalParams{};
    const int c = fx.dofs->porous_cells()[0];
    SystemState s{1, VecX::Zero(fx.dofs->total())};
    const int d = fx.dofs->darcy_velocity_dofs(c)[1];
    s.values[fx.dofs->offset(Field::DarcyVelocity) + d] = 1;
    const auto r = element_residuals_porous(*fx.dofs, fx.params, s, s, {}, c, fx.dt);
    const oracle::RaviartThomas rt(fx.mesh, c);
    double ref = 0;
    for (const auto& q : oracle::duffy(fx.mesh, c)) ref += q.w * rt.value(1, q.x).squaredNorm();
    check_rel(r.darcy_norm2, ref);
    CHECK(std::abs(r.curl) < 1e-12);
  }
  SUBCASE("fluid cell is rejected") {
    const Fixture fx(4);
    CHECK_THROWS_AS(element_residuals_porous(*fx.dofs, fx.params, fx.current, fx.previous, {},
                                             fx.dofs->fluid_cells()[0], fx.dt),
                    DomainError);
  }
}

TEST_CASE("edge jumps match two-sided traces") {
  for (unsigned seed : {1u, 2u, 3u}) {
    for (bool mu_p : {false, true}) {
      const Fixture fx(seed);
      EstimatorOptions opt;
      opt.porous_jump_uses_mu_p = mu_p;
      const double shear = mu_p ? fx.params.mu_p : fx.params.mu;
      int checked = 0;
      for (int e = 0; e < fx.mesh.n_edges(); ++e) {
        const auto& E = fx.mesh.edge(e);
        if (E.tag != EdgeTag::InteriorFluid && E.tag != EdgeTag::InteriorPorous) {
          CHECK_THROWS_AS(edge_jump(*fx.dofs, fx.params, fx.current, e, opt), DomainError);
          continue;
        }
        ++checked;
        const Vec2 n = outward_from(fx.mesh, e, E.cells[0]);
        const auto J = edge_jump(*fx.dofs, fx.params, fx.current, e, opt);
        const auto pts = oracle::segment(fx.mesh.vertex(E.v[0]), fx.mesh.vertex(E.v[1]), 3);
        double norm2 = 0;
        for (std::size_t k = 0; k < pts.size(); ++k) {
          const Vec2 ref = (oracle_jump_stress(fx, fx.current.values, E.cells[0], pts[k].x, shear) -
                            oracle_jump_stress(fx, fx.current.values, E.cells[1], pts[k].x, shear)) * n;
          CHECK((J[k] - ref).norm() <= 1e-10 * std::max(1.0, ref.norm()));
          norm2 += pts[k].w * ref.squaredNorm();
        }
        check_rel(edge_jump_norm2(*fx.dofs, fx.params, fx.current, e, opt), norm2);
      }
      CHECK(checked > 0);
    }
  }
  SUBCASE("pressure step of one across a porous edge") {
    const Fixture fx(2);
    int e = 0;
    while (fx.mesh.edge(e).tag != EdgeTag::InteriorPorous) ++e;
    SystemState s{0, VecX::Zero(fx.dofs->total())};
    s.values[fx.dofs->offset(Field::DarcyPressure) + fx.dofs->darcy_pressure_dof(fx.mesh.edge(e).cells[1])] = 1;
    for (const Vec2& j : edge_jump(*fx.dofs, fx.params, s, e)) CHECK(j.norm() == doctest::Approx(1.0));
  }
}

TEST_CASE("interface residuals match trace evaluation") {
  for (unsigned seed : {1u, 2u, 3u}) {
    const Fixture fx(seed);
    for (int e : fx.dofs->interface_edges()) {
      CAPTURE(seed);
      CAPTURE(e);
      const auto& E = fx.mesh.edge(e);
      const int cf = fx.mesh.subdomain(E.cells[0]) == Subdomain::Fluid ? E.cells[0] : E.cells[1];
      const int cp = cf == E.cells[0] ? E.cells[1] : E.cells[0];
      const Vec2 nf = outward_from(fx.mesh, e, cf), np = -nf, tau(-nf.y(), nf.x());
      const double gamma = fx.params.mu * fx.params.alpha_bjs / std::sqrt(tau.dot(fx.params.K * tau));
      const oracle::FluidField F(*fx.dofs, fx.current.values, cf);
      const oracle::PorousField P(*fx.dofs, fx.current.values, cp), P0(*fx.dofs, fx.previous.values, cp);
      const Mat2 sp = fx.params.lambda_p * P.grad_eta().trace() * Mat2::Identity() +
                      fx.params.mu_p * (P.grad_eta() + P.grad_eta().transpose()) - fx.params.alpha * P.p * Mat2::Identity();
      const auto r = interface_residuals(*fx.dofs, fx.params, fx.data, fx.current, fx.previous, e, fx.dt);
      const double t = fx.current.t;
      std::array<double, 4> norm2{};
      const auto pts = oracle::segment(fx.mesh.vertex(E.v[0]), fx.mesh.vertex(E.v[1]), 3);
      for (std::size_t k = 0; k < pts.size(); ++k) {
        const Vec2 x = pts[k].x;
        const Vec2 tr = F.stress(fx.params.mu, x) * nf;
        const Vec2 rate = (P.displacement(x) - P0.displacement(x)) / fx.dt;
        const double R1 = F.velocity(x).dot(nf) + (rate + P.velocity(x)).dot(np) - fx.exact.g1(x, t, nf);
        const double R2 = P.p + tr.dot(nf) - fx.exact.g2(x, t, nf);
        const Vec2 R3 = tr + sp * np - fx.exact.g3(x, t, nf);
        const double R4 = tr.dot(tau) + gamma * (F.velocity(x) - rate).dot(tau) - fx.exact.g4(x, t, nf);
        CHECK(std::abs(r.R1[k] - R1) <= 1e-10 * std::max(1.0, std::abs(R1)));
        CHECK(std::abs(r.R2[k] - R2) <= 1e-10 * std::max(1.0, std::abs(R2)));
        CHECK((r.R3[k] - R3).norm() <= 1e-10 * std::max(1.0, R3.norm()));
        CHECK(std::abs(r.R4[k] - R4) <= 1e-10 * std::max(1.0, std::abs(R4)));
        norm2[0] += pts[k].w * R1 * R1;
        norm2[1] += pts[k].w * R2 * R2;
        norm2[2] += pts[k].w * R3.squaredNorm();
        norm2[3] += pts[k].w * R4 * R4;
      }
      for (int k = 0; k < 4; ++k) check_rel(r.norm2[k], norm2[k]);
    }
    CHECK_THROWS_AS(interface_residuals(*fx.dofs, fx.params, fx.data, fx.current, fx.previous, 0, fx.dt), DomainError);
  }
  SUBCASE("normal mass balance with a static skeleton") {
    const Fixture fx(3);
    const int e = fx.dofs->interface_edges()[0];
    const auto ie = interface_edge(fx.mesh, e);
    // u_f = n_f everywhere on the fluid side, Darcy flux with u_p . n_p = -1.
    SystemState s{0, VecX::Zero(fx.dofs->total())};
    const int ou = fx.dofs->offset(Field::StokesVelocity);
    for (int a = 0; a < fx.dofs->count(Field::StokesVelocity); ++a) s.values[ou + a] = ie.n_f[a % 2];
    const Vec2 ng = oracle::global_normal(fx.mesh, e);
    s.values[fx.dofs->offset(Field::DarcyVelocity) + fx.dofs->porous_edge_dof(e)] = ng.dot(ie.n_f) * ie.length;
    const auto r = interface_residuals(*fx.dofs, fx.params, zero_data(), s, s, e, fx.dt);
    for (double v : r.R1) CHECK(std::abs(v) < 1e-12);
  }
}

TEST_CASE("oscillation matches quadrature and decays under refinement") {
  const Fixture fx(9);
  for (int c = 0; c < fx.mesh.n_cells(); ++c) {
    const double t = fx.current.t;
    const auto p = project_cell(fx.data, fx.mesh, c, t);
    const auto osc = oscillation(fx.data, fx.mesh, p, c, t);
    double of = 0, oq = 0;
    if (fx.mesh.subdomain(c) == Subdomain::Fluid) {
      const Vec2 fK = mean_f(fx, c, t);
      const double qK = mean_q(fx, c, t);
      for (const auto& q : oracle::duffy(fx.mesh, c)) {
        of += q.w * (fx.data.f_f(q.x, t) - fK).squaredNorm();
        oq += q.w * std::pow(fx.data.q_f(q.x, t) - qK, 2);
      }
    } else {
      const auto ref = project_p1(fx, c, t);
      const oracle::Lagrange L(oracle::p1_nodes(fx.mesh, c), 1);
      for (const auto& q : oracle::duffy(fx.mesh, c)) {
        Vec2 f = Vec2::Zero();
        double s = 0;
        for (int i = 0; i < 3; ++i) {
          f += L.value(i, q.x) * Vec2(ref(i, 0), ref(i, 1));
          s += L.value(i, q.x) * ref(i, 2);
        }
        of += q.w * (fx.data.f_p(q.x, t) - f).squaredNorm();
        oq += q.w * std::pow(fx.data.q_p(q.x, t) - s, 2);
      }
    }
    CHECK(std::abs(osc[0] - of) <= 1e-10 * std::max(of, 1e-12));
    CHECK(std::abs(osc[1] - oq) <= 1e-10 * std::max(oq, 1e-12));
  }

  // Quadratic f_f on a fixed cell family: h^2 ||f - f_K||^2 scales as h^4.
  ProblemData d = zero_data();
  d.f_f = [](const Vec2& x, double) { return Vec2(x.x() * x.x(), x.x() * x.y()); };
  std::vector<double> z;
  for (int nx : {4, 8, 16}) {
    RectangleConfig rc;
    rc.nx = nx;
    rc.ny = nx;
    const Mesh m = build_reference_geometry(rc);
    double zeta2 = 0;
    for (int c = 0; c < m.n_cells(); ++c) {
      const double h = cell_geometry(m, c).h;
      zeta2 += h * h * oscillation(d, m, project_cell(d, m, c, 0), c, 0)[0];
    }
    z.push_back(zeta2);
  }
  CHECK(std::log2(z[0] / z[1]) == doctest::Approx(4).epsilon(0.05));
  CHECK(std::log2(z[1] / z[2]) == doctest::Approx(4).epsilon(0.05));
}

TEST_CASE("running maximum over steps") {
  const Fixture fx(1);
  auto random_norms = [&](unsigned seed) {
    StepNorms s;
    const VecX v = oracle::random_vector(fx.mesh.n_cells() * kCellTermCount + fx.mesh.n_edges() * 4, seed).cwiseAbs();
    int k = 0;
    s.cell.resize(fx.mesh.n_cells());
    s.edge.resize(fx.mesh.n_edges());
    for (auto& row : s.cell)
      for (double& x : row) x = v[k++];
    for (auto& row : s.edge)
      for (double& x : row) x = v[k++];
    return s;
  };
  const auto a = random_norms(1), b = random_norms(2), c = random_norms(3);
  StepNorms run;
  accumulate_step(run, a);
  CHECK(run.cell == a.cell);
  CHECK(run.edge == a.edge);
  accumulate_step(run, b);
  accumulate_step(run, c);
  for (std::size_t i = 0; i < run.cell.size(); ++i)
    for (int k = 0; k < kCellTermCount; ++k) CHECK(run.cell[i][k] == std::max({a.cell[i][k], b.cell[i][k], c.cell[i][k]}));
  for (std::size_t i = 0; i < run.edge.size(); ++i)
    for (int k = 0; k < 4; ++k) CHECK(run.edge[i][k] == std::max({a.edge[i][k], b.edge[i][k], c.edge[i][k]}));

  SUBCASE("smaller later steps leave the report unchanged") {
    StepNorms r;
    accumulate_step(r, a);
    StepNorms half = a;
    for (auto& row : half.cell)
      for (double& x : row) x *= 0.5;
    for (auto& row : half.edge)
      for (double& x : row) x *= 0.5;
    accumulate_step(r, half);
    CHECK(r.cell == a.cell);
    CHECK(r.edge == a.edge);
  }

  SUBCASE("weights and edge ownership") {
    const auto rep = finalize_report(fx.mesh, run, 3);
    for (int k = 0; k < fx.mesh.n_cells(); ++k) {
      const auto& v = fx.mesh.cell(k).v;
      double h = 0;
      for (int i = 0; i < 3; ++i) h = std::max(h, (fx.mesh.vertex(v[i]) - fx.mesh.vertex(v[(i + 1) % 3])).norm());
      double jumps = 0, iface = 0;
      for (int e = 0; e < fx.mesh.n_edges(); ++e) {
        const auto& E = fx.mesh.edge(e);
        if (E.cells[0] != k && E.cells[1] != k) continue;
        const double hE = (fx.mesh.vertex(E.v[1]) - fx.mesh.vertex(E.v[0])).norm();
        if (E.tag == EdgeTag::InteriorFluid || E.tag == EdgeTag::InteriorPorous) jumps += hE * run.edge[e][0];
        if (E.tag == EdgeTag::GammaFP) iface += hE * (run.edge[e][0] + run.edge[e][1] + run.edge[e][2] + run.edge[e][3]);
      }
      const auto& n = run.cell[k];
      const auto& ind = rep.cells[k];
      if (fx.mesh.subdomain(k) == Subdomain::Fluid) {
        check_rel(ind.theta_f2, h * h * n[kFluidMomentum] + n[kFluidMass] + jumps);
        CHECK(ind.theta_p2 == 0);
      } else {
        check_rel(ind.theta_p2, h * h * (n[kPorousForce] + n[kPorousDarcy] + n[kPorousCurl]) + n[kPorousMass] + jumps);
        CHECK(ind.theta_f2 == 0);
      }
      check_rel(ind.theta_pf2 + 1, iface + 1);
      check_rel(ind.zeta2, h * h * (n[kOscForce] + n[kOscSource]));
    }
  }
}

TEST_CASE("global estimate is the root sum of squares") {
  EstimatorReport r;
  CHECK(global_estimate(r).first == 0);
  r.cells.push_back({0, Subdomain::Fluid, 1, 0, 0, 0, 0});
  r.cells.push_back({1, Subdomain::Porous, 1, 0, 9, 0, 0});
  CHECK(global_estimate(r).first == doctest::Approx(3));
  const VecX v = oracle::random_vector(40, 5).cwiseAbs();
  r.cells.clear();
  double t = 0, z = 0;
  for (int i = 0; i < 10; ++i) {
    r.cells.push_back({i, Subdomain::Fluid, 1, v[4 * i], v[4 * i + 1], v[4 * i + 2], v[4 * i + 3]});
    t += v[4 * i] + v[4 * i + 1] + v[4 * i + 2];
    z += v[4 * i + 3];
  }
  const auto [theta, zeta] = global_estimate(r);
  check_rel(theta, std::sqrt(t), 1e-12);
  check_rel(zeta, std::sqrt(z), 1e-12);
}

TEST_CASE("indicators are local to the edge patch") {
  RectangleConfig rc;
  rc.nx = 4;
  rc.ny = 4;
  const Mesh mesh = build_reference_geometry(rc);
  const DofMap dofs(mesh);
  const auto p = builtin_problem("builtin-smooth");
  const SystemState prev{0.1, oracle::random_vector(dofs.total(), 1)};
  SystemState cur{0.2, oracle::random_vector(dofs.total(), 2)};
  const auto base = finalize_report(mesh, step_norms(dofs, p.params, p.data, cur, prev, 0.1), 1);
  for (const auto& k : base.cells) CHECK(k.theta2() >= 0);

  // Perturb every dof of a cell that shares no vertex with the edge patch of
  // cell 0: continuous dofs are shared through vertices.
  const int k = 0;
  std::vector<int> near;
  for (int c : {k, mesh.neighbor(k, 0), mesh.neighbor(k, 1), mesh.neighbor(k, 2)})
    if (c >= 0)
      for (int v : mesh.cell(c).v) near.push_back(v);
  int far = -1;
  for (int c = mesh.n_cells() - 1; c >= 0 && far < 0; --c) {
    bool shares = false;
    for (int a : mesh.cell(c).v) shares |= std::find(near.begin(), near.end(), a) != near.end();
    if (!shares && mesh.subdomain(c) == mesh.subdomain(k)) far = c;
  }
  REQUIRE(far >= 0);
  for (Field f : kAllFields) {
    if (f == Field::Multiplier) continue;
    if ((f == Field::StokesVelocity || f == Field::StokesPressure) != (mesh.subdomain(far) == Subdomain::Fluid)) continue;
    for (int d : dofs.cell_dofs(f, far)) cur.values[dofs.offset(f) + d] += 1.5;
  }
  const auto moved = finalize_report(mesh, step_norms(dofs, p.params, p.data, cur, prev, 0.1), 1);
  CHECK(moved.cells[k].theta2() == doctest::Approx(base.cells[k].theta2()).epsilon(1e-13));
  CHECK(moved.cells[far].theta2() != doctest::Approx(base.cells[far].theta2()));
}
