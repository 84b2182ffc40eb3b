#include "sbfem/estimator.hpp"

#include "sbfem/quadrature.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>

namespace sbfem {

namespace {

constexpr int kMeanDegree = 4;
constexpr int kDataDegree = 7;

}  // namespace

CellProjection project_cell(const ProblemData& data, const Mesh& mesh, int cell, double t) {
  const auto g = cell_geometry(mesh, cell);
  CellProjection p;
  if (mesh.subdomain(cell) == Subdomain::Fluid) {
    const auto& rule = triangle_rule(kMeanDegree);
    for (int q = 0; q < rule.size(); ++q) {
      const Vec2 x = g.map(rule.points[q]);
      p.f_mean += rule.weights[q] * data.f_f(x, t);
      p.q_mean += rule.weights[q] * data.q_f(x, t);
    }
    return p;
  }
  // Local P1 mass matrix |K| (1 + delta_ij) / 12, in units of |K|.
  Eigen::Matrix3d M = Eigen::Matrix3d::Constant(1.0 / 12.0);
  M.diagonal().setConstant(1.0 / 6.0);
  Eigen::Matrix<double, 3, 3> rhs = Eigen::Matrix<double, 3, 3>::Zero();  // columns: f_x, f_y, q
  const auto& rule = triangle_rule(kDataDegree);
  for (int q = 0; q < rule.size(); ++q) {
    const Vec3& l = rule.points[q];
    const Vec2 x = g.map(l);
    const Vec2 f = data.f_p(x, t);
    const double s = data.q_p(x, t);
    rhs.col(0) += rule.weights[q] * f.x() * l;
    rhs.col(1) += rule.weights[q] * f.y() * l;
    rhs.col(2) += rule.weights[q] * s * l;
  }
  const Eigen::Matrix3d c = M.partialPivLu().solve(rhs);
  for (int i = 0; i < 3; ++i) {
    p.f_p1[i] = Vec2(c(i, 0), c(i, 1));
    p.q_p1[i] = c(i, 2);
  }
  return p;
}

std::vector<CellProjection> project_data(const ProblemData& data, const Mesh& mesh, double t) {
  std::vector<CellProjection> out;
  out.reserve(mesh.n_cells());
  for (int c = 0; c < mesh.n_cells(); ++c) out.push_back(project_cell(data, mesh, c, t));
  return out;
}

FluidResiduals element_residuals_fluid(const DofMap& dofs, const PhysicalParams& params, const SystemState& current,
                                       const CellProjection& proj, int cell) {
  if (dofs.mesh().subdomain(cell) != Subdomain::Fluid) throw DomainError("fluid residual on a porous cell");
  const auto L = gather_fluid(dofs, current.values, cell);
  FluidResiduals r;
  const Vec2 div_sigma = -L.pressure_gradient() + params.mu * (L.laplacian_velocity() + L.grad_div_velocity());
  r.momentum = proj.f_mean + div_sigma;
  r.momentum_norm2 = L.geo.area * r.momentum.squaredNorm();
  const auto& rule = triangle_rule(kMeanDegree);
  for (int q = 0; q < rule.size(); ++q) {
    const double m = proj.q_mean - L.velocity_gradient(rule.points[q]).trace();
    r.mass_norm2 += rule.weights[q] * L.geo.area * m * m;
  }
  return r;
}

PorousResiduals element_residuals_porous(const DofMap& dofs, const PhysicalParams& params, const SystemState& current,
                                         const SystemState& previous, const CellProjection& proj, int cell,
                                         double dt, const EstimatorOptions& options) {
  if (dofs.mesh().subdomain(cell) != Subdomain::Porous) throw DomainError("porous residual on a fluid cell");
  if (!(dt > 0)) throw DomainError("time step must be positive");
  const auto L = gather_porous(dofs, current.values, cell);
  const auto L0 = gather_porous(dofs, previous.values, cell);
  const Mat2 R = params.mu * params.K.inverse();
  PorousResiduals r;
  const Mat2 grad_r2 = R * L.darcy_jacobian();
  r.curl = grad_r2(1, 0) - grad_r2(0, 1);
  r.curl_norm2 = L.geo.area * r.curl * r.curl;
  const double rate = (params.s0 * (L.p - L0.p) +
                       params.alpha * (L.displacement_gradient().trace() - L0.displacement_gradient().trace())) /
                      dt;
  const double div_u = L.darcy_divergence();
  const double sign = options.strict_printed_signs ? 1.0 : -1.0;
  const auto& rule = triangle_rule(kMeanDegree);
  for (int q = 0; q < rule.size(); ++q) {
    const Vec3& l = rule.points[q];
    const double w = rule.weights[q] * L.geo.area;
    r.force_norm2 += w * proj.f_at(l).squaredNorm();
    r.darcy_norm2 += w * (R * L.darcy_velocity(L.geo.map(l))).squaredNorm();
    const double m = proj.q_at(l) - rate + sign * div_u;
    r.mass_norm2 += w * m * m;
  }
  return r;
}

namespace {

Mat2 jump_stress(const DofMap& dofs, const PhysicalParams& params, const VecX& values, int cell, const Vec3& bary,
                 const EstimatorOptions& options) {
  if (dofs.mesh().subdomain(cell) == Subdomain::Fluid) {
    const auto L = gather_fluid(dofs, values, cell);
    return stress_stokes(params, L.velocity_gradient(bary), L.pressure(bary));
  }
  const auto L = gather_porous(dofs, values, cell);
  const double shear = options.porous_jump_uses_mu_p ? params.mu_p : params.mu;
  const Mat2 G = L.displacement_gradient();
  return shear * (G + G.transpose()) - L.p * Mat2::Identity();
}

}  // namespace

std::vector<Vec2> edge_jump(const DofMap& dofs, const PhysicalParams& params, const SystemState& state, int edge,
                            const EstimatorOptions& options) {
  const Mesh& mesh = dofs.mesh();
  const Edge& E = mesh.edge(edge);
  if (E.tag != EdgeTag::InteriorFluid && E.tag != EdgeTag::InteriorPorous)
    throw DomainError("jumps are defined on interior subdomain edges only");
  const Vec2 n = cell_geometry(mesh, E.cells[0]).normal[E.local[0]];
  const auto& rule = edge_rule();
  std::vector<Vec2> out;
  for (int q = 0; q < rule.size(); ++q) {
    const double s = rule.points[q];
    const Mat2 lo = jump_stress(dofs, params, state.values, E.cells[0], edge_point_in_cell(mesh, E.cells[0], edge, s), options);
    const Mat2 hi = jump_stress(dofs, params, state.values, E.cells[1], edge_point_in_cell(mesh, E.cells[1], edge, s), options);
    out.push_back((lo - hi) * n);
  }
  return out;
}

double edge_jump_norm2(const DofMap& dofs, const PhysicalParams& params, const SystemState& state, int edge,
                       const EstimatorOptions& options) {
  const Mesh& mesh = dofs.mesh();
  const Edge& E = mesh.edge(edge);
  const double len = (mesh.vertex(E.v[1]) - mesh.vertex(E.v[0])).norm();
  const auto J = edge_jump(dofs, params, state, edge, options);
  const auto& rule = edge_rule();
  double sum = 0;
  for (int q = 0; q < rule.size(); ++q) sum += rule.weights[q] * len * J[q].squaredNorm();
  return sum;
}

InterfaceResiduals interface_residuals(const DofMap& dofs, const PhysicalParams& params, const ProblemData& data,
                                       const SystemState& current, const SystemState& previous, int edge, double dt) {
  if (!(dt > 0)) throw DomainError("time step must be positive");
  const Mesh& mesh = dofs.mesh();
  const auto ie = interface_edge(mesh, edge);
  const Vec2 n_f = ie.n_f, n_p = -ie.n_f, tau = interface_tangent(n_f);
  const double gamma = bjs_coefficient(params, tau);
  const auto F = gather_fluid(dofs, current.values, ie.fluid_cell);
  const auto P = gather_porous(dofs, current.values, ie.porous_cell);
  const auto P0 = gather_porous(dofs, previous.values, ie.porous_cell);
  const Mat2 sigma_p = stress_poroelastic(params, P.displacement_gradient(), P.p);
  const Edge& E = mesh.edge(edge);
  const double t = current.t;
  const auto& rule = edge_rule();
  InterfaceResiduals r;
  for (int q = 0; q < rule.size(); ++q) {
    const double s = rule.points[q];
    const Vec2 x = (1 - s) * mesh.vertex(E.v[0]) + s * mesh.vertex(E.v[1]);
    const Vec3 bf = edge_point_in_cell(mesh, ie.fluid_cell, edge, s);
    const Vec3 bp = edge_point_in_cell(mesh, ie.porous_cell, edge, s);
    const Vec2 u_f = F.velocity(bf);
    const Vec2 traction = stress_stokes(params, F.velocity_gradient(bf), F.pressure(bf)) * n_f;
    const Vec2 rate = (P.displacement(bp) - P0.displacement(bp)) / dt;
    const double w = rule.weights[q] * ie.length;
    r.R1.push_back(u_f.dot(n_f) + (rate + P.darcy_velocity(x)).dot(n_p) - data.g1(x, t, n_f));
    r.R2.push_back(P.p + traction.dot(n_f) - data.g2(x, t, n_f));
    r.R3.push_back(traction + sigma_p * n_p - data.g3(x, t, n_f));
    r.R4.push_back(traction.dot(tau) + gamma * (u_f - rate).dot(tau) - data.g4(x, t, n_f));
    r.norm2[0] += w * r.R1.back() * r.R1.back();
    r.norm2[1] += w * r.R2.back() * r.R2.back();
    r.norm2[2] += w * r.R3.back().squaredNorm();
    r.norm2[3] += w * r.R4.back() * r.R4.back();
  }
  return r;
}

std::array<double, 2> oscillation(const ProblemData& data, const Mesh& mesh, const CellProjection& proj, int cell,
                                  double t) {
  const auto g = cell_geometry(mesh, cell);
  const bool fluid = mesh.subdomain(cell) == Subdomain::Fluid;
  const auto& rule = triangle_rule(kDataDegree);
  std::array<double, 2> out{};
  for (int q = 0; q < rule.size(); ++q) {
    const Vec3& l = rule.points[q];
    const Vec2 x = g.map(l);
    const double w = rule.weights[q] * g.area;
    const Vec2 df = fluid ? Vec2(data.f_f(x, t) - proj.f_mean) : Vec2(data.f_p(x, t) - proj.f_at(l));
    const double dq = fluid ? data.q_f(x, t) - proj.q_mean : data.q_p(x, t) - proj.q_at(l);
    out[0] += w * df.squaredNorm();
    out[1] += w * dq * dq;
  }
  return out;
}

StepNorms step_norms(const DofMap& dofs, const PhysicalParams& params, const ProblemData& data,
                     const SystemState& current, const SystemState& previous, double dt,
                     const EstimatorOptions& options) {
  const Mesh& mesh = dofs.mesh();
  StepNorms s;
  s.cell.assign(mesh.n_cells(), {});
  s.edge.assign(mesh.n_edges(), {});
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const auto proj = project_cell(data, mesh, c, current.t);
    auto& row = s.cell[c];
    if (mesh.subdomain(c) == Subdomain::Fluid) {
      const auto r = element_residuals_fluid(dofs, params, current, proj, c);
      row[kFluidMomentum] = r.momentum_norm2;
      row[kFluidMass] = r.mass_norm2;
    } else {
      const auto r = element_residuals_porous(dofs, params, current, previous, proj, c, dt, options);
      row[kPorousForce] = r.force_norm2;
      row[kPorousDarcy] = r.darcy_norm2;
      row[kPorousCurl] = r.curl_norm2;
      row[kPorousMass] = r.mass_norm2;
    }
    const auto osc = oscillation(data, mesh, proj, c, current.t);
    row[kOscForce] = osc[0];
    row[kOscSource] = osc[1];
  }
  for (int e = 0; e < mesh.n_edges(); ++e) {
    const EdgeTag tag = mesh.edge(e).tag;
    if (tag == EdgeTag::InteriorFluid || tag == EdgeTag::InteriorPorous) {
      s.edge[e][0] = edge_jump_norm2(dofs, params, current, e, options);
    } else if (tag == EdgeTag::GammaFP) {
      s.edge[e] = interface_residuals(dofs, params, data, current, previous, e, dt).norm2;
    }
  }
  return s;
}

void accumulate_step(StepNorms& running, const StepNorms& step) {
  if (running.cell.empty() && running.edge.empty()) {
    running = step;
    return;
  }
  if (running.cell.size() != step.cell.size() || running.edge.size() != step.edge.size())
    throw DomainError("step norms do not match the running report");
  for (std::size_t c = 0; c < step.cell.size(); ++c)
    for (int k = 0; k < kCellTermCount; ++k) running.cell[c][k] = std::max(running.cell[c][k], step.cell[c][k]);
  for (std::size_t e = 0; e < step.edge.size(); ++e)
    for (int k = 0; k < 4; ++k) running.edge[e][k] = std::max(running.edge[e][k], step.edge[e][k]);
}

EstimatorReport finalize_report(const Mesh& mesh, const StepNorms& running, int steps) {
  EstimatorReport report;
  report.steps = steps;
  if (running.cell.empty()) {
    for (int c = 0; c < mesh.n_cells(); ++c) report.cells.push_back({c, mesh.subdomain(c), cell_geometry(mesh, c).h});
    return report;
  }
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const auto g = cell_geometry(mesh, c);
    const auto& n = running.cell[c];
    ElementIndicator ind{c, mesh.subdomain(c), g.h};
    const double h2 = g.h * g.h;
    double jumps = 0, interface = 0;
    for (int i = 0; i < 3; ++i) {
      const int e = mesh.cell_edges(c)[i];
      const EdgeTag tag = mesh.edge(e).tag;
      const double hE = g.edge_length[i];
      if (tag == EdgeTag::InteriorFluid || tag == EdgeTag::InteriorPorous) jumps += hE * running.edge[e][0];
      else if (tag == EdgeTag::GammaFP)
        for (double v : running.edge[e]) interface += hE * v;
    }
    if (ind.subdomain == Subdomain::Fluid) {
      ind.theta_f2 = h2 * n[kFluidMomentum] + n[kFluidMass] + jumps;
    } else {
      ind.theta_p2 = h2 * (n[kPorousForce] + n[kPorousDarcy] + n[kPorousCurl]) + n[kPorousMass] + jumps;
    }
    ind.theta_pf2 = interface;
    ind.zeta2 = h2 * (n[kOscForce] + n[kOscSource]);
    report.cells.push_back(ind);
  }
  std::tie(report.theta, report.zeta) = global_estimate(report);
  return report;
}

std::pair<double, double> global_estimate(const EstimatorReport& report) {
  double t = 0, z = 0;
  for (const auto& c : report.cells) {
    t += c.theta2();
    z += c.zeta2;
  }
  return {std::sqrt(t), std::sqrt(z)};
}

EstimatorAccumulator::EstimatorAccumulator(const DofMap& dofs, const PhysicalParams& params, EstimatorOptions options)
    : dofs_(&dofs), params_(params), options_(options) {}

void EstimatorAccumulator::add_step(const ProblemData& data, const SystemState& current, const SystemState& previous,
                                    double dt) {
  accumulate_step(running_, step_norms(*dofs_, params_, data, current, previous, dt, options_));
  ++steps_;
}

EstimatorReport EstimatorAccumulator::report() const { return finalize_report(dofs_->mesh(), running_, steps_); }

}  // namespace sbfem
