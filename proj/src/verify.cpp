#include "sbfem/verify.hpp"

#include "sbfem/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sbfem {

namespace {

constexpr int kErrorDegree = 7;

bool time_l2(int c) { return c == kErrF || c == kErrP || c == kErrFP || c == kErrLambda; }

}  // namespace

const char* error_name(int component) {
  static constexpr const char* names[] = {"e_f", "e_p", "e_s", "e_pp", "e_fp", "e_lambda"};
  if (component < 0 || component >= kErrorComponentCount) throw DomainError("unknown error component");
  return names[component];
}

SpatialErrors spatial_errors(const DofMap& dofs, const SystemState& state, const ManufacturedCase& exact) {
  const Mesh& mesh = dofs.mesh();
  const double t = state.t;
  const auto& rule = triangle_rule(kErrorDegree);
  SpatialErrors out;
  out.cell.assign(mesh.n_cells(), 0.0);

  for (int c : dofs.fluid_cells()) {
    const auto L = gather_fluid(dofs, state.values, c);
    double ef = 0, efp = 0;
    for (int q = 0; q < rule.size(); ++q) {
      const Vec3& l = rule.points[q];
      const Vec2 x = L.geo.map(l);
      const double w = rule.weights[q] * L.geo.area;
      ef += w * ((exact.u_f(x, t) - L.velocity(l)).squaredNorm() +
                 (exact.grad_u_f(x, t) - L.velocity_gradient(l)).squaredNorm());
      const double dp = exact.p_f(x, t) - L.pressure(l);
      efp += w * dp * dp;
    }
    out.total[kErrF] += ef;
    out.total[kErrFP] += efp;
    out.cell[c] += ef + efp;
  }

  for (int c : dofs.porous_cells()) {
    const auto L = gather_porous(dofs, state.values, c);
    const Mat2 grad_h = L.displacement_gradient();
    double ep = 0, es = 0, epp = 0;
    for (int q = 0; q < rule.size(); ++q) {
      const Vec3& l = rule.points[q];
      const Vec2 x = L.geo.map(l);
      const double w = rule.weights[q] * L.geo.area;
      ep += w * (exact.u_p(x, t) - L.darcy_velocity(x)).squaredNorm();
      es += w * ((exact.eta(x, t) - L.displacement(l)).squaredNorm() + (exact.grad_eta(x, t) - grad_h).squaredNorm());
      const double dp = exact.p_p(x, t) - L.p;
      epp += w * dp * dp;
    }
    out.total[kErrP] += ep;
    out.total[kErrS] += es;
    out.total[kErrPP] += epp;
    out.cell[c] += ep + es + epp;
  }

  const auto& erule = edge_rule();
  for (int e : dofs.interface_edges()) {
    const auto ie = interface_edge(mesh, e);
    const Edge& edge = mesh.edge(e);
    const Vec2& a = mesh.vertex(edge.v[0]);
    const Vec2& b = mesh.vertex(edge.v[1]);
    const double lam_h = state.values[dofs.offset(Field::Multiplier) + dofs.multiplier_dof(e)];
    double el = 0;
    for (int q = 0; q < erule.size(); ++q) {
      const double s = erule.points[q];
      const double d = exact.lambda((1 - s) * a + s * b, t, ie.n_f) - lam_h;
      el += erule.weights[q] * ie.length * d * d;
    }
    el *= ie.length;
    out.total[kErrLambda] += el;
    out.cell[ie.fluid_cell] += el;
    out.cell[ie.porous_cell] += el;
  }
  return out;
}

ErrorAccumulator::ErrorAccumulator(const DofMap& dofs, std::shared_ptr<const ManufacturedCase> exact)
    : dofs_(&dofs), exact_(std::move(exact)), local_(dofs.mesh().n_cells(), 0.0) {
  if (!exact_) throw DomainError("error norms need a closed-form solution");
}

void ErrorAccumulator::add_step(const SystemState& state, double dt) {
  const auto s = spatial_errors(*dofs_, state, *exact_);
  for (int c = 0; c < kErrorComponentCount; ++c) {
    if (time_l2(c)) {
      acc_[c] += dt * s.total[c];
    } else {
      acc_[c] = std::max(acc_[c], s.total[c]);
    }
  }
  for (std::size_t k = 0; k < local_.size(); ++k) local_[k] = std::max(local_[k], s.cell[k]);
  ++steps_;
}

ErrorReport ErrorAccumulator::report(double theta) const {
  ErrorReport r;
  double sum = 0;
  for (int c = 0; c < kErrorComponentCount; ++c) {
    r.norm[c] = std::sqrt(acc_[c]);
    sum += acc_[c];
  }
  r.combined = std::sqrt(sum);
  r.effectivity = r.combined > 0 ? theta / r.combined : std::numeric_limits<double>::quiet_NaN();
  r.local = local_;
  r.steps = steps_;
  return r;
}

ErrorReport error_norms(const DofMap& dofs, const std::vector<SystemState>& history,
                        std::shared_ptr<const ManufacturedCase> exact, const TimeGrid& grid, double theta) {
  if (static_cast<int>(history.size()) != grid.steps + 1) throw DomainError("solution history is missing time steps");
  const double tol = 1e-9 * std::max(1.0, grid.T);
  for (int n = 0; n <= grid.steps; ++n) {
    if (std::abs(history[n].t - grid.time(n)) > tol) throw DomainError("solution history does not match the time grid");
    if (history[n].values.size() != dofs.total()) throw DomainError("state does not match the dof map");
  }
  ErrorAccumulator acc(dofs, std::move(exact));
  for (int n = 1; n <= grid.steps; ++n) acc.add_step(history[n], grid.dt);
  return acc.report(theta);
}

std::vector<int> patch(const Mesh& mesh, int cell) {
  std::vector<int> out{cell};
  for (int i = 0; i < 3; ++i) {
    const int nb = mesh.neighbor(cell, i);
    if (nb >= 0) out.push_back(nb);
  }
  std::sort(out.begin(), out.end());
  return out;
}

double efficiency_ratio(const Mesh& mesh, const EstimatorReport& estimate, const ErrorReport& errors) {
  if (static_cast<int>(estimate.cells.size()) != mesh.n_cells() ||
      static_cast<int>(errors.local.size()) != mesh.n_cells()) {
    throw DomainError("indicator table does not match the mesh");
  }
  double worst = 0;
  for (int c = 0; c < mesh.n_cells(); ++c) {
    double err2 = 0, zeta = 0;
    for (int k : patch(mesh, c)) {
      err2 += errors.local[k];
      zeta += std::sqrt(estimate.cells[k].zeta2);
    }
    const double denom = std::sqrt(err2) + zeta;
    const double theta = std::sqrt(estimate.cells[c].theta2());
    if (denom > 0) {
      worst = std::max(worst, theta / denom);
    } else if (theta > 0) {
      return std::numeric_limits<double>::infinity();
    }
  }
  return worst;
}

double observed_rate(double e_coarse, double e_fine, double h_coarse, double h_fine) {
  if (!(e_coarse > 0) || !(e_fine > 0) || !std::isfinite(e_coarse) || !std::isfinite(e_fine) ||
      !(h_coarse > 0) || !(h_fine > 0) || h_coarse == h_fine) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  return std::log(e_coarse / e_fine) / std::log(h_coarse / h_fine);
}

}  // namespace sbfem
