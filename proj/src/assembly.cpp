#include "sbfem/assembly.hpp"

#include "sbfem/quadrature.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>

namespace sbfem {

TimeGrid TimeGrid::make(double T, double dt) {
  if (!(dt > 0) || !std::isfinite(dt)) throw ParameterError("dt must be positive");
  if (!(T > 0) || !std::isfinite(T)) throw ParameterError("T must be positive");
  const double ratio = T / dt;
  const double n = std::round(ratio);
  if (n < 1 || std::abs(ratio - n) > 1e-9 * std::max(1.0, ratio))
    throw ParameterError("T / dt must be a positive integer");
  return {T, dt, static_cast<int>(n)};
}

namespace {

constexpr int kAssemblyDegree = 4;
constexpr int kLoadDegree = 7;

int fidx(Field f) { return static_cast<int>(f); }

SparseMatrix from_triplets(int rows, int cols, const std::vector<Triplet>& t) {
  SparseMatrix m(rows, cols);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

// Shared kernel of a_f and a_p^e: shear * (D:D) * 2 + lambda * div div, with
// vector Lagrange functions (node, component).
template <int N>
void add_elastic_cell(std::vector<Triplet>& t, const std::array<int, 2 * N>& dofs,
                      const std::array<Vec2, N>& grad, double weight, double shear, double lambda) {
  for (int a = 0; a < 2 * N; ++a) {
    const int n = a / 2, c = a % 2;
    for (int b = 0; b < 2 * N; ++b) {
      const int m = b / 2, d = b % 2;
      // 2 mu D(phi_a):D(phi_b) = mu (delta_cd grad N_n . grad N_m + d_d N_n d_c N_m)
      double v = shear * ((c == d ? grad[n].dot(grad[m]) : 0.0) + grad[n][d] * grad[m][c]);
      v += lambda * grad[n][c] * grad[m][d];
      if (v != 0) t.emplace_back(dofs[a], dofs[b], weight * v);
    }
  }
}

std::array<Vec2, 3> p1_gradients(const CellGeometry& g) { return g.grad_bary; }

Vec2 edge_point(const Mesh& mesh, int edge, double s) {
  const Edge& E = mesh.edge(edge);
  return (1 - s) * mesh.vertex(E.v[0]) + s * mesh.vertex(E.v[1]);
}

}  // namespace

SparseMatrix assemble_a_f(const DofMap& dofs, const PhysicalParams& params) {
  const int n = dofs.count(Field::StokesVelocity);
  std::vector<Triplet> t;
  const auto& rule = triangle_rule(kAssemblyDegree);
  for (int c : dofs.fluid_cells()) {
    const auto g = cell_geometry(dofs.mesh(), c);
    const auto d = dofs.stokes_velocity_dofs(c);
    for (int q = 0; q < rule.size(); ++q)
      add_elastic_cell<6>(t, d, p2_gradients(g, rule.points[q]), rule.weights[q] * g.area, params.mu, 0.0);
  }
  return from_triplets(n, n, t);
}

SparseMatrix assemble_a_p_e(const DofMap& dofs, const PhysicalParams& params) {
  const int n = dofs.count(Field::Displacement);
  std::vector<Triplet> t;
  for (int c : dofs.porous_cells()) {
    const auto g = cell_geometry(dofs.mesh(), c);
    add_elastic_cell<3>(t, dofs.displacement_dofs(c), p1_gradients(g), g.area, params.mu_p, params.lambda_p);
  }
  return from_triplets(n, n, t);
}

SparseMatrix assemble_a_p_d(const DofMap& dofs, const PhysicalParams& params) {
  const int n = dofs.count(Field::DarcyVelocity);
  const Mat2 Kinv = params.mu * params.K.inverse();
  std::vector<Triplet> t;
  const auto& rule = triangle_rule(kAssemblyDegree);
  for (int c : dofs.porous_cells()) {
    const auto g = cell_geometry(dofs.mesh(), c);
    const auto s = rt0_signs(dofs.mesh(), c);
    const auto d = dofs.darcy_velocity_dofs(c);
    Eigen::Matrix3d local = Eigen::Matrix3d::Zero();
    for (int q = 0; q < rule.size(); ++q) {
      const auto phi = rt0_values(g, s, g.map(rule.points[q]));
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) local(i, j) += rule.weights[q] * g.area * phi[i].dot(Kinv * phi[j]);
    }
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) t.emplace_back(d[i], d[j], local(i, j));
  }
  return from_triplets(n, n, t);
}

SparseMatrix assemble_b_f(const DofMap& dofs) {
  std::vector<Triplet> t;
  const auto& rule = triangle_rule(kAssemblyDegree);
  for (int c : dofs.fluid_cells()) {
    const auto g = cell_geometry(dofs.mesh(), c);
    const auto du = dofs.stokes_velocity_dofs(c);
    const auto dp = dofs.stokes_pressure_dofs(c);
    for (int q = 0; q < rule.size(); ++q) {
      const Vec3& l = rule.points[q];
      const auto grad = p2_gradients(g, l);
      const double w = rule.weights[q] * g.area;
      for (int i = 0; i < 3; ++i)
        for (int a = 0; a < 12; ++a) t.emplace_back(dp[i], du[a], -w * l[i] * grad[a / 2][a % 2]);
    }
  }
  return from_triplets(dofs.count(Field::StokesPressure), dofs.count(Field::StokesVelocity), t);
}

SparseMatrix assemble_b_p(const DofMap& dofs) {
  std::vector<Triplet> t;
  for (int c : dofs.porous_cells()) {
    const auto s = rt0_signs(dofs.mesh(), c);
    const auto d = dofs.darcy_velocity_dofs(c);
    // div phi_j = s_j / |K| integrates to s_j.
    for (int j = 0; j < 3; ++j) t.emplace_back(dofs.darcy_pressure_dof(c), d[j], -s[j]);
  }
  return from_triplets(dofs.count(Field::DarcyPressure), dofs.count(Field::DarcyVelocity), t);
}

SparseMatrix assemble_b_p_eta(const DofMap& dofs) {
  std::vector<Triplet> t;
  for (int c : dofs.porous_cells()) {
    const auto g = cell_geometry(dofs.mesh(), c);
    const auto d = dofs.displacement_dofs(c);
    for (int a = 0; a < 6; ++a) t.emplace_back(dofs.darcy_pressure_dof(c), d[a], -g.area * g.grad_bary[a / 2][a % 2]);
  }
  return from_triplets(dofs.count(Field::DarcyPressure), dofs.count(Field::Displacement), t);
}

SparseMatrix assemble_mass_p(const DofMap& dofs) {
  std::vector<Triplet> t;
  for (int c : dofs.porous_cells())
    t.emplace_back(dofs.darcy_pressure_dof(c), dofs.darcy_pressure_dof(c), cell_geometry(dofs.mesh(), c).area);
  const int n = dofs.count(Field::DarcyPressure);
  return from_triplets(n, n, t);
}

BjsBlocks assemble_a_BJS(const DofMap& dofs, const PhysicalParams& params) {
  const Mesh& mesh = dofs.mesh();
  const auto& rule = edge_rule();
  std::vector<Triplet> tuu, tue, tee;
  for (int e : dofs.interface_edges()) {
    const auto ie = interface_edge(mesh, e);
    const Vec2 tau = interface_tangent(ie.n_f);
    const double gamma = bjs_coefficient(params, tau);
    const auto du = dofs.stokes_velocity_dofs(ie.fluid_cell);
    const auto de = dofs.displacement_dofs(ie.porous_cell);
    for (int q = 0; q < rule.size(); ++q) {
      const double w = rule.weights[q] * ie.length * gamma;
      const auto N = p2_values<double>(edge_point_in_cell(mesh, ie.fluid_cell, e, rule.points[q]));
      const Vec3 L = edge_point_in_cell(mesh, ie.porous_cell, e, rule.points[q]);
      std::array<double, 12> fu{};
      std::array<double, 6> fe{};
      for (int a = 0; a < 12; ++a) fu[a] = N[a / 2] * tau[a % 2];
      for (int a = 0; a < 6; ++a) fe[a] = L[a / 2] * tau[a % 2];
      for (int a = 0; a < 12; ++a) {
        for (int b = 0; b < 12; ++b) tuu.emplace_back(du[a], du[b], w * fu[a] * fu[b]);
        for (int b = 0; b < 6; ++b) tue.emplace_back(du[a], de[b], -w * fu[a] * fe[b]);
      }
      for (int a = 0; a < 6; ++a)
        for (int b = 0; b < 6; ++b) tee.emplace_back(de[a], de[b], w * fe[a] * fe[b]);
    }
  }
  const int nu = dofs.count(Field::StokesVelocity), ne = dofs.count(Field::Displacement);
  return {from_triplets(nu, nu, tuu), from_triplets(nu, ne, tue), from_triplets(ne, ne, tee)};
}

GammaBlocks assemble_b_Gamma(const DofMap& dofs) {
  const Mesh& mesh = dofs.mesh();
  const auto& rule = edge_rule();
  std::vector<Triplet> tf, tp, te;
  for (int e : dofs.interface_edges()) {
    const auto ie = interface_edge(mesh, e);
    const Vec2 n_p = -ie.n_f;
    const int m = dofs.multiplier_dof(e);
    const auto du = dofs.stokes_velocity_dofs(ie.fluid_cell);
    const auto dv = dofs.darcy_velocity_dofs(ie.porous_cell);
    const auto de = dofs.displacement_dofs(ie.porous_cell);
    const auto gp = cell_geometry(mesh, ie.porous_cell);
    const auto sp = rt0_signs(mesh, ie.porous_cell);
    for (int q = 0; q < rule.size(); ++q) {
      const double w = rule.weights[q] * ie.length;
      const auto N = p2_values<double>(edge_point_in_cell(mesh, ie.fluid_cell, e, rule.points[q]));
      const Vec3 L = edge_point_in_cell(mesh, ie.porous_cell, e, rule.points[q]);
      const auto phi = rt0_values(gp, sp, gp.map(L));
      for (int a = 0; a < 12; ++a) tf.emplace_back(m, du[a], w * N[a / 2] * ie.n_f[a % 2]);
      for (int j = 0; j < 3; ++j) tp.emplace_back(m, dv[j], w * phi[j].dot(n_p));
      for (int a = 0; a < 6; ++a) te.emplace_back(m, de[a], w * L[a / 2] * n_p[a % 2]);
    }
  }
  const int nm = dofs.count(Field::Multiplier);
  return {from_triplets(nm, dofs.count(Field::StokesVelocity), tf),
          from_triplets(nm, dofs.count(Field::DarcyVelocity), tp),
          from_triplets(nm, dofs.count(Field::Displacement), te)};
}

namespace {

void add_block(std::vector<Triplet>& t, const SparseMatrix& block, int row0, int col0, double scale,
               bool transpose = false) {
  for (int k = 0; k < block.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(block, k); it; ++it) {
      if (it.value() == 0) continue;
      const int r = static_cast<int>(transpose ? it.col() : it.row());
      const int c = static_cast<int>(transpose ? it.row() : it.col());
      t.emplace_back(row0 + r, col0 + c, scale * it.value());
    }
}

// Flux of a vector function through an edge along the global edge normal.
double edge_flux(const Mesh& mesh, int edge, const VectorFn& f, double t) {
  const auto& rule = edge_rule();
  const Edge& E = mesh.edge(edge);
  const Vec2 n = edge_normal(mesh, edge);
  const double len = (mesh.vertex(E.v[1]) - mesh.vertex(E.v[0])).norm();
  double sum = 0;
  for (int q = 0; q < rule.size(); ++q) sum += rule.weights[q] * len * f(edge_point(mesh, edge, rule.points[q]), t).dot(n);
  return sum;
}

}  // namespace

StepAssembler::StepAssembler(const DofMap& dofs, const PhysicalParams& params, double dt)
    : dofs_(&dofs), params_(params), dt_(dt) {
  if (!(dt > 0)) throw DomainError("time step must be positive");
  params_.validate();
  const auto a_f = assemble_a_f(dofs, params);
  const auto a_d = assemble_a_p_d(dofs, params);
  const auto a_e = assemble_a_p_e(dofs, params);
  const auto b_f = assemble_b_f(dofs);
  const auto b_p = assemble_b_p(dofs);
  b_eta_ = assemble_b_p_eta(dofs);
  mass_p_ = assemble_mass_p(dofs);
  bjs_ = assemble_a_BJS(dofs, params);
  gamma_ = assemble_b_Gamma(dofs);

  const int ou = dofs.offset(Field::StokesVelocity), opf = dofs.offset(Field::StokesPressure),
            od = dofs.offset(Field::DarcyVelocity), opp = dofs.offset(Field::DarcyPressure),
            oe = dofs.offset(Field::Displacement), ol = dofs.offset(Field::Multiplier);
  const double a = params.alpha;
  std::vector<Triplet> t;
  // Stokes momentum
  add_block(t, a_f, ou, ou, 1);
  add_block(t, bjs_.uu, ou, ou, 1);
  add_block(t, b_f, ou, opf, 1, true);
  add_block(t, bjs_.ue, ou, oe, 1 / dt);
  add_block(t, gamma_.f, ou, ol, 1, true);
  // Stokes mass
  add_block(t, b_f, opf, ou, -1);
  // Darcy
  add_block(t, a_d, od, od, 1);
  add_block(t, b_p, od, opp, 1, true);
  add_block(t, gamma_.p, od, ol, 1, true);
  // Porous mass
  add_block(t, b_p, opp, od, -1);
  add_block(t, mass_p_, opp, opp, params.s0 / dt);
  add_block(t, b_eta_, opp, oe, -a / dt);
  // Elasticity
  add_block(t, a_e, oe, oe, 1);
  add_block(t, bjs_.ue, oe, ou, 1, true);
  add_block(t, bjs_.ee, oe, oe, 1 / dt);
  add_block(t, b_eta_, oe, opp, a, true);
  add_block(t, gamma_.e, oe, ol, 1, true);
  // Multiplier
  add_block(t, gamma_.f, ol, ou, 1);
  add_block(t, gamma_.p, ol, od, 1);
  add_block(t, gamma_.e, ol, oe, 1 / dt);

  const int n = dofs.total();
  full_ = from_triplets(n, n, t);

  std::vector<Triplet> sel;
  const auto free = dofs.free_to_full();
  for (int i = 0; i < static_cast<int>(free.size()); ++i) sel.emplace_back(i, free[i], 1.0);
  restrict_ = from_triplets(static_cast<int>(free.size()), n, sel);
  reduced_ = restrict_ * full_ * restrict_.transpose();
  reduced_.makeCompressed();
}

VecX StepAssembler::boundary_values(const ProblemData& data, double t) const {
  const DofMap& dofs = *dofs_;
  const Mesh& mesh = dofs.mesh();
  VecX x = VecX::Zero(dofs.total());
  const int ou = dofs.offset(Field::StokesVelocity), od = dofs.offset(Field::DarcyVelocity),
            oe = dofs.offset(Field::Displacement);
  for (int e = 0; e < mesh.n_edges(); ++e) {
    const Edge& E = mesh.edge(e);
    if (E.tag == EdgeTag::GammaF) {
      const std::array<std::pair<int, Vec2>, 3> nodes{{{dofs.fluid_vertex_node(E.v[0]), mesh.vertex(E.v[0])},
                                                       {dofs.fluid_vertex_node(E.v[1]), mesh.vertex(E.v[1])},
                                                       {dofs.fluid_edge_node(e), edge_point(mesh, e, 0.5)}}};
      for (const auto& [node, p] : nodes) x.segment<2>(ou + 2 * node) = data.u_f_boundary(p, t);
    } else if (E.tag == EdgeTag::GammaPN || E.tag == EdgeTag::GammaPD) {
      if (E.tag == EdgeTag::GammaPN) x[od + dofs.porous_edge_dof(e)] = edge_flux(mesh, e, data.u_p_boundary, t);
      for (int v : E.v) x.segment<2>(oe + 2 * dofs.porous_vertex_node(v)) = data.eta_boundary(mesh.vertex(v), t);
    }
  }
  return x;
}

VecX StepAssembler::full_rhs(const ProblemData& data, const SystemState& previous, double t) const {
  const DofMap& dofs = *dofs_;
  const Mesh& mesh = dofs.mesh();
  if (previous.values.size() != dofs.total()) throw DomainError("state does not match the dof map");
  VecX b = VecX::Zero(dofs.total());
  const int ou = dofs.offset(Field::StokesVelocity), opf = dofs.offset(Field::StokesPressure),
            od = dofs.offset(Field::DarcyVelocity), opp = dofs.offset(Field::DarcyPressure),
            oe = dofs.offset(Field::Displacement), ol = dofs.offset(Field::Multiplier);
  const auto& rule = triangle_rule(kLoadDegree);

  for (int c : dofs.fluid_cells()) {
    const auto g = cell_geometry(mesh, c);
    const auto du = dofs.stokes_velocity_dofs(c);
    const auto dp = dofs.stokes_pressure_dofs(c);
    for (int q = 0; q < rule.size(); ++q) {
      const Vec3& l = rule.points[q];
      const Vec2 x = g.map(l);
      const double w = rule.weights[q] * g.area;
      const Vec2 f = data.f_f(x, t);
      const double qf = data.q_f(x, t);
      const auto N = p2_values<double>(l);
      for (int a = 0; a < 12; ++a) b[ou + du[a]] += w * N[a / 2] * f[a % 2];
      for (int i = 0; i < 3; ++i) b[opf + dp[i]] += w * l[i] * qf;
    }
  }
  for (int c : dofs.porous_cells()) {
    const auto g = cell_geometry(mesh, c);
    const auto de = dofs.displacement_dofs(c);
    for (int q = 0; q < rule.size(); ++q) {
      const Vec3& l = rule.points[q];
      const Vec2 x = g.map(l);
      const double w = rule.weights[q] * g.area;
      const Vec2 f = data.f_p(x, t);
      for (int a = 0; a < 6; ++a) b[oe + de[a]] += w * l[a / 2] * f[a % 2];
      b[opp + dofs.darcy_pressure_dof(c)] += w * data.q_p(x, t);
    }
  }

  const auto& er = edge_rule();
  for (int e : dofs.interface_edges()) {
    const auto ie = interface_edge(mesh, e);
    const Vec2 n_p = -ie.n_f, tau = interface_tangent(ie.n_f);
    const auto du = dofs.stokes_velocity_dofs(ie.fluid_cell);
    const auto dv = dofs.darcy_velocity_dofs(ie.porous_cell);
    const auto de = dofs.displacement_dofs(ie.porous_cell);
    const auto gp = cell_geometry(mesh, ie.porous_cell);
    const auto sp = rt0_signs(mesh, ie.porous_cell);
    for (int q = 0; q < er.size(); ++q) {
      const double w = er.weights[q] * ie.length;
      const Vec2 x = edge_point(mesh, e, er.points[q]);
      const auto N = p2_values<double>(edge_point_in_cell(mesh, ie.fluid_cell, e, er.points[q]));
      const Vec3 L = edge_point_in_cell(mesh, ie.porous_cell, e, er.points[q]);
      const auto phi = rt0_values(gp, sp, x);
      const double g1 = data.g1(x, t, ie.n_f), g2 = data.g2(x, t, ie.n_f), g4 = data.g4(x, t, ie.n_f);
      const Vec2 g3 = data.g3(x, t, ie.n_f);
      for (int a = 0; a < 12; ++a) b[ou + du[a]] += w * g4 * N[a / 2] * tau[a % 2];
      for (int a = 0; a < 6; ++a) b[oe + de[a]] += w * L[a / 2] * (g3[a % 2] - g4 * tau[a % 2]);
      for (int j = 0; j < 3; ++j) b[od + dv[j]] -= w * g2 * phi[j].dot(n_p);
      b[ol + dofs.multiplier_dof(e)] += w * g1;
    }
  }

  // Natural pressure data on Gamma_p^D.
  for (int e = 0; e < mesh.n_edges(); ++e) {
    const Edge& E = mesh.edge(e);
    if (E.tag != EdgeTag::GammaPD) continue;
    const int c = E.cells[0];
    const auto g = cell_geometry(mesh, c);
    const auto s = rt0_signs(mesh, c);
    const auto dv = dofs.darcy_velocity_dofs(c);
    const Vec2 n = g.normal[E.local[0]];
    const double len = g.edge_length[E.local[0]];
    for (int q = 0; q < er.size(); ++q) {
      const Vec2 x = edge_point(mesh, e, er.points[q]);
      const auto phi = rt0_values(g, s, x);
      const double pd = data.p_p_boundary(x, t);
      for (int j = 0; j < 3; ++j) b[od + dv[j]] -= er.weights[q] * len * pd * phi[j].dot(n);
    }
  }

  // Backward-Euler history terms.
  const VecX eta_old = previous.field(dofs, Field::Displacement);
  const VecX p_old = previous.field(dofs, Field::DarcyPressure);
  b.segment(ou, dofs.count(Field::StokesVelocity)) += bjs_.ue * eta_old / dt_;
  b.segment(oe, dofs.count(Field::Displacement)) += bjs_.ee * eta_old / dt_;
  b.segment(opp, dofs.count(Field::DarcyPressure)) +=
      (params_.s0 / dt_) * (mass_p_ * p_old) - (params_.alpha / dt_) * (b_eta_ * eta_old);
  b.segment(ol, dofs.count(Field::Multiplier)) += gamma_.e * eta_old / dt_;
  return b;
}

BlockSystem StepAssembler::system(const ProblemData& data, const SystemState& previous, double t_new) const {
  BlockSystem sys;
  sys.matrix = reduced_;
  const VecX xb = boundary_values(data, t_new);
  sys.rhs = restrict_ * (full_rhs(data, previous, t_new) - full_ * xb);
  const DofMap& dofs = *dofs_;
  const auto free = dofs.free_to_full();
  for (Field f : kAllFields) {
    const int lo = dofs.offset(f), hi = lo + dofs.count(f);
    const auto b = std::lower_bound(free.begin(), free.end(), lo) - free.begin();
    const auto e = std::lower_bound(free.begin(), free.end(), hi) - free.begin();
    sys.blocks[fidx(f)] = {static_cast<int>(b), static_cast<int>(e)};
  }
  return sys;
}

SystemState StepAssembler::expand(const VecX& free_solution, const ProblemData& data, double t) const {
  if (free_solution.size() != dofs_->n_free()) throw DomainError("solution does not match the free dofs");
  SystemState s;
  s.t = t;
  s.values = boundary_values(data, t) + restrict_.transpose() * free_solution;
  return s;
}

BlockSystem assemble_step_system(const DofMap& dofs, const PhysicalParams& params, const ProblemData& data,
                                 const SystemState& previous, double t_new, double dt) {
  return StepAssembler(dofs, params, dt).system(data, previous, t_new);
}

SystemState interpolate_exact(const ManufacturedCase& exact, const DofMap& dofs, double t) {
  const Mesh& mesh = dofs.mesh();
  SystemState s;
  s.t = t;
  s.values = VecX::Zero(dofs.total());
  const int ou = dofs.offset(Field::StokesVelocity), opf = dofs.offset(Field::StokesPressure),
            od = dofs.offset(Field::DarcyVelocity), opp = dofs.offset(Field::DarcyPressure),
            oe = dofs.offset(Field::Displacement), ol = dofs.offset(Field::Multiplier);
  for (int v = 0; v < mesh.n_vertices(); ++v) {
    const Vec2& x = mesh.vertex(v);
    if (const int n = dofs.fluid_vertex_node(v); n >= 0) {
      s.values.segment<2>(ou + 2 * n) = exact.u_f(x, t);
      s.values[opf + n] = exact.p_f(x, t);
    }
    if (const int n = dofs.porous_vertex_node(v); n >= 0) s.values.segment<2>(oe + 2 * n) = exact.eta(x, t);
  }
  const VectorFn up = [&exact](const Vec2& x, double tt) { return exact.u_p(x, tt); };
  const auto& er = edge_rule();
  for (int e = 0; e < mesh.n_edges(); ++e) {
    if (const int n = dofs.fluid_edge_node(e); n >= 0)
      s.values.segment<2>(ou + 2 * n) = exact.u_f(edge_point(mesh, e, 0.5), t);
    if (const int j = dofs.porous_edge_dof(e); j >= 0) s.values[od + j] = edge_flux(mesh, e, up, t);
    if (const int m = dofs.multiplier_dof(e); m >= 0) {
      const auto ie = interface_edge(mesh, e);
      double mean = 0;
      for (int q = 0; q < er.size(); ++q) mean += er.weights[q] * exact.lambda(edge_point(mesh, e, er.points[q]), t, ie.n_f);
      s.values[ol + m] = mean;
    }
  }
  const auto& rule = triangle_rule(kLoadDegree);
  for (int c : dofs.porous_cells()) {
    const auto g = cell_geometry(mesh, c);
    double mean = 0;
    for (int q = 0; q < rule.size(); ++q) mean += rule.weights[q] * exact.p_p(g.map(rule.points[q]), t);
    s.values[opp + dofs.darcy_pressure_dof(c)] = mean;
  }
  return s;
}

SystemState apply_initial_conditions(const ProblemData& data, const DofMap& dofs, const ManufacturedCase* exact) {
  const Mesh& mesh = dofs.mesh();
  SystemState s;
  if (exact) {
    s = interpolate_exact(*exact, dofs, 0.0);
  } else {
    s.t = 0;
    s.values = VecX::Zero(dofs.total());
  }
  const int opp = dofs.offset(Field::DarcyPressure), oe = dofs.offset(Field::Displacement);
  const auto& rule = triangle_rule(kLoadDegree);
  for (int c : dofs.porous_cells()) {
    const auto g = cell_geometry(mesh, c);
    double mean = 0;
    for (int q = 0; q < rule.size(); ++q) mean += rule.weights[q] * data.p_p0(g.map(rule.points[q]), 0.0);
    s.values[opp + dofs.darcy_pressure_dof(c)] = mean;
  }
  for (int v = 0; v < mesh.n_vertices(); ++v)
    if (const int n = dofs.porous_vertex_node(v); n >= 0) s.values.segment<2>(oe + 2 * n) = data.eta0(mesh.vertex(v), 0.0);
  return s;
}

}  // namespace sbfem
