#include "sbfem/dofmap.hpp"

#include "sbfem/quadrature.hpp"

namespace sbfem {

std::string_view to_string(Field f) {
  switch (f) {
    case Field::StokesVelocity: return "u_f";
    case Field::StokesPressure: return "p_f";
    case Field::DarcyVelocity: return "u_p";
    case Field::DarcyPressure: return "p_p";
    case Field::Displacement: return "eta_p";
    case Field::Multiplier: return "lambda";
  }
  return "?";
}

SpaceDescriptor describe(Field f) {
  switch (f) {
    case Field::StokesVelocity: return {f, Family::P2, 2, 2, Subdomain::Fluid, {EdgeTag::GammaF}};
    case Field::StokesPressure: return {f, Family::P1, 1, 1, Subdomain::Fluid, {}};
    case Field::DarcyVelocity: return {f, Family::RT0, 0, 2, Subdomain::Porous, {EdgeTag::GammaPN}};
    case Field::DarcyPressure: return {f, Family::P1, 0, 1, Subdomain::Porous, {}};
    case Field::Displacement:
      return {f, Family::P1, 1, 2, Subdomain::Porous, {EdgeTag::GammaPD, EdgeTag::GammaPN}};
    case Field::Multiplier: return {f, Family::P1, 0, 1, Subdomain::Porous, {}};
  }
  throw DomainError("unknown field");
}

DofMap::DofMap(const Mesh& mesh) : mesh_(&mesh) {
  const int nv = mesh.n_vertices(), ne = mesh.n_edges(), nc = mesh.n_cells();
  fluid_vertex_.assign(nv, -1);
  porous_vertex_.assign(nv, -1);
  fluid_edge_.assign(ne, -1);
  porous_edge_.assign(ne, -1);
  porous_cell_.assign(nc, -1);
  interface_edge_.assign(ne, -1);

  for (int c = 0; c < nc; ++c) {
    const bool fluid = mesh.subdomain(c) == Subdomain::Fluid;
    (fluid ? fluid_cells_ : porous_cells_).push_back(c);
    if (!fluid) porous_cell_[c] = static_cast<int>(porous_cells_.size()) - 1;
  }

  // Vertices are numbered in index order within each subdomain.
  std::vector<char> in_fluid(nv, 0), in_porous(nv, 0);
  for (int c = 0; c < nc; ++c)
    for (int v : mesh.cell(c).v) (mesh.subdomain(c) == Subdomain::Fluid ? in_fluid : in_porous)[v] = 1;
  int nfv = 0, npv = 0;
  for (int v = 0; v < nv; ++v) {
    if (in_fluid[v]) fluid_vertex_[v] = nfv++;
    if (in_porous[v]) porous_vertex_[v] = npv++;
  }
  n_fluid_vertices_ = nfv;

  int nfe = 0, npe = 0, nie = 0;
  for (int e = 0; e < ne; ++e) {
    const Edge& edge = mesh.edge(e);
    bool fluid = false, porous = false;
    for (int c : edge.cells) {
      if (c < 0) continue;
      (mesh.subdomain(c) == Subdomain::Fluid ? fluid : porous) = true;
    }
    if (fluid) fluid_edge_[e] = nfv + nfe++;
    if (porous) porous_edge_[e] = npe++;
    if (edge.tag == EdgeTag::GammaFP) {
      interface_edge_[e] = nie++;
      interface_edges_list_.push_back(e);
    }
  }

  count_[static_cast<int>(Field::StokesVelocity)] = 2 * (nfv + nfe);
  count_[static_cast<int>(Field::StokesPressure)] = nfv;
  count_[static_cast<int>(Field::DarcyVelocity)] = npe;
  count_[static_cast<int>(Field::DarcyPressure)] = static_cast<int>(porous_cells_.size());
  count_[static_cast<int>(Field::Displacement)] = 2 * npv;
  count_[static_cast<int>(Field::Multiplier)] = nie;
  for (int f = 0; f < kFieldCount; ++f) {
    offset_[f] = total_;
    total_ += count_[f];
  }

  std::vector<char> fixed(total_, 0);
  const int ou = offset(Field::StokesVelocity), od = offset(Field::DarcyVelocity),
            oe = offset(Field::Displacement);
  for (int e = 0; e < ne; ++e) {
    const Edge& edge = mesh.edge(e);
    if (edge.tag == EdgeTag::GammaF) {
      for (int node : {fluid_vertex_[edge.v[0]], fluid_vertex_[edge.v[1]], fluid_edge_[e]})
        fixed[ou + 2 * node] = fixed[ou + 2 * node + 1] = 1;
    } else if (edge.tag == EdgeTag::GammaPN || edge.tag == EdgeTag::GammaPD) {
      if (edge.tag == EdgeTag::GammaPN) fixed[od + porous_edge_[e]] = 1;
      for (int v : edge.v) {
        const int node = porous_vertex_[v];
        fixed[oe + 2 * node] = fixed[oe + 2 * node + 1] = 1;
      }
    }
  }

  full_to_free_.assign(total_, -1);
  for (int i = 0; i < total_; ++i) {
    if (fixed[i]) continue;
    full_to_free_[i] = static_cast<int>(free_to_full_.size());
    free_to_full_.push_back(i);
  }
}

std::array<int, 12> DofMap::stokes_velocity_dofs(int cell) const {
  if (mesh_->subdomain(cell) != Subdomain::Fluid) throw DomainError("Stokes velocity lives on fluid cells");
  std::array<int, 12> d{};
  const auto& v = mesh_->cell(cell).v;
  const auto& e = mesh_->cell_edges(cell);
  for (int i = 0; i < 3; ++i) {
    const int nv = fluid_vertex_[v[i]], ne = fluid_edge_[e[i]];
    d[2 * i] = 2 * nv;
    d[2 * i + 1] = 2 * nv + 1;
    d[6 + 2 * i] = 2 * ne;
    d[6 + 2 * i + 1] = 2 * ne + 1;
  }
  return d;
}

std::array<int, 3> DofMap::stokes_pressure_dofs(int cell) const {
  if (mesh_->subdomain(cell) != Subdomain::Fluid) throw DomainError("Stokes pressure lives on fluid cells");
  const auto& v = mesh_->cell(cell).v;
  return {fluid_vertex_[v[0]], fluid_vertex_[v[1]], fluid_vertex_[v[2]]};
}

std::array<int, 3> DofMap::darcy_velocity_dofs(int cell) const {
  if (mesh_->subdomain(cell) != Subdomain::Porous) throw DomainError("Darcy velocity lives on porous cells");
  const auto& e = mesh_->cell_edges(cell);
  return {porous_edge_[e[0]], porous_edge_[e[1]], porous_edge_[e[2]]};
}

std::array<int, 6> DofMap::displacement_dofs(int cell) const {
  if (mesh_->subdomain(cell) != Subdomain::Porous) throw DomainError("displacement lives on porous cells");
  std::array<int, 6> d{};
  const auto& v = mesh_->cell(cell).v;
  for (int i = 0; i < 3; ++i) {
    d[2 * i] = 2 * porous_vertex_[v[i]];
    d[2 * i + 1] = d[2 * i] + 1;
  }
  return d;
}

std::vector<int> DofMap::cell_dofs(Field f, int cell) const {
  switch (f) {
    case Field::StokesVelocity: {
      auto d = stokes_velocity_dofs(cell);
      return {d.begin(), d.end()};
    }
    case Field::StokesPressure: {
      auto d = stokes_pressure_dofs(cell);
      return {d.begin(), d.end()};
    }
    case Field::DarcyVelocity: {
      auto d = darcy_velocity_dofs(cell);
      return {d.begin(), d.end()};
    }
    case Field::DarcyPressure:
      if (mesh_->subdomain(cell) != Subdomain::Porous) throw DomainError("Darcy pressure lives on porous cells");
      return {porous_cell_[cell]};
    case Field::Displacement: {
      auto d = displacement_dofs(cell);
      return {d.begin(), d.end()};
    }
    case Field::Multiplier: {
      std::vector<int> d;
      for (int e : mesh_->cell_edges(cell))
        if (interface_edge_[e] >= 0) d.push_back(interface_edge_[e]);
      return d;
    }
  }
  return {};
}

Vec2 FluidLocal::velocity(const Vec3& bary) const {
  const auto phi = p2_values<double>(bary);
  Vec2 out = Vec2::Zero();
  for (int n = 0; n < 6; ++n) out += phi[n] * u[n];
  return out;
}

Mat2 FluidLocal::velocity_gradient(const Vec3& bary) const {
  const auto d = p2_gradients(geo, bary);
  Mat2 out = Mat2::Zero();
  for (int n = 0; n < 6; ++n) out += u[n] * d[n].transpose();
  return out;
}

double FluidLocal::pressure(const Vec3& bary) const { return bary[0] * p[0] + bary[1] * p[1] + bary[2] * p[2]; }

Vec2 FluidLocal::pressure_gradient() const {
  return p[0] * geo.grad_bary[0] + p[1] * geo.grad_bary[1] + p[2] * geo.grad_bary[2];
}

Vec2 FluidLocal::laplacian_velocity() const {
  const auto h = p2_hessians(geo);
  Vec2 out = Vec2::Zero();
  for (int n = 0; n < 6; ++n) out += h[n].trace() * u[n];
  return out;
}

Vec2 FluidLocal::grad_div_velocity() const {
  const auto h = p2_hessians(geo);
  Vec2 out = Vec2::Zero();
  for (int n = 0; n < 6; ++n) out += h[n] * u[n];
  return out;
}

Vec2 PorousLocal::darcy_velocity(const Vec2& x) const {
  const auto phi = rt0_values(geo, sign, x);
  return flux[0] * phi[0] + flux[1] * phi[1] + flux[2] * phi[2];
}

double PorousLocal::darcy_divergence() const {
  return (sign[0] * flux[0] + sign[1] * flux[1] + sign[2] * flux[2]) / geo.area;
}

Mat2 PorousLocal::darcy_jacobian() const { return Mat2::Identity() * darcy_divergence() / 2; }

Vec2 PorousLocal::displacement(const Vec3& bary) const {
  return bary[0] * eta[0] + bary[1] * eta[1] + bary[2] * eta[2];
}

Mat2 PorousLocal::displacement_gradient() const {
  Mat2 out = Mat2::Zero();
  for (int i = 0; i < 3; ++i) out += eta[i] * geo.grad_bary[i].transpose();
  return out;
}

FluidLocal gather_fluid(const DofMap& dofs, const VecX& values, int cell) {
  FluidLocal L;
  L.geo = cell_geometry(dofs.mesh(), cell);
  const auto du = dofs.stokes_velocity_dofs(cell);
  const auto dp = dofs.stokes_pressure_dofs(cell);
  const int ou = dofs.offset(Field::StokesVelocity), op = dofs.offset(Field::StokesPressure);
  for (int n = 0; n < 6; ++n) L.u[n] = Vec2(values[ou + du[2 * n]], values[ou + du[2 * n + 1]]);
  for (int i = 0; i < 3; ++i) L.p[i] = values[op + dp[i]];
  return L;
}

PorousLocal gather_porous(const DofMap& dofs, const VecX& values, int cell) {
  PorousLocal L;
  L.geo = cell_geometry(dofs.mesh(), cell);
  L.sign = rt0_signs(dofs.mesh(), cell);
  const auto dv = dofs.darcy_velocity_dofs(cell);
  const auto de = dofs.displacement_dofs(cell);
  const int ov = dofs.offset(Field::DarcyVelocity), oe = dofs.offset(Field::Displacement);
  for (int i = 0; i < 3; ++i) {
    L.flux[i] = values[ov + dv[i]];
    L.eta[i] = Vec2(values[oe + de[2 * i]], values[oe + de[2 * i + 1]]);
  }
  L.p = values[dofs.offset(Field::DarcyPressure) + dofs.darcy_pressure_dof(cell)];
  return L;
}

InterfaceEdge interface_edge(const Mesh& mesh, int edge) {
  const Edge& E = mesh.edge(edge);
  if (E.tag != EdgeTag::GammaFP) throw DomainError("not an interface edge");
  InterfaceEdge ie;
  ie.edge = edge;
  const int k = mesh.subdomain(E.cells[0]) == Subdomain::Fluid ? 0 : 1;
  ie.fluid_cell = E.cells[k];
  ie.porous_cell = E.cells[1 - k];
  ie.n_f = cell_geometry(mesh, ie.fluid_cell).normal[E.local[k]];
  ie.length = (mesh.vertex(E.v[1]) - mesh.vertex(E.v[0])).norm();
  return ie;
}

EdgeTrace trace_on_edge(const DofMap& dofs, const VecX& values, Field field, int edge, int cell) {
  const Mesh& mesh = dofs.mesh();
  const auto& rule = edge_rule();
  const Edge& E = mesh.edge(edge);
  if (E.cells[0] != cell && E.cells[1] != cell) throw DomainError("edge is not incident to the cell");
  const Subdomain side = mesh.subdomain(cell);
  if (side != describe(field).support && field != Field::Multiplier)
    throw DomainError("field is not defined on the requested side");

  EdgeTrace tr;
  for (int q = 0; q < rule.size(); ++q) {
    const Vec3 bary = edge_point_in_cell(mesh, cell, edge, rule.points[q]);
    const Vec2 x = (1 - rule.points[q]) * mesh.vertex(E.v[0]) + rule.points[q] * mesh.vertex(E.v[1]);
    tr.x.push_back(x);
    switch (field) {
      case Field::StokesVelocity: {
        const auto L = gather_fluid(dofs, values, cell);
        tr.vector.push_back(L.velocity(bary));
        tr.gradient.push_back(L.velocity_gradient(bary));
        break;
      }
      case Field::StokesPressure:
        tr.scalar.push_back(gather_fluid(dofs, values, cell).pressure(bary));
        break;
      case Field::DarcyVelocity:
        tr.vector.push_back(gather_porous(dofs, values, cell).darcy_velocity(x));
        break;
      case Field::DarcyPressure:
        tr.scalar.push_back(gather_porous(dofs, values, cell).p);
        break;
      case Field::Displacement: {
        const auto L = gather_porous(dofs, values, cell);
        tr.vector.push_back(L.displacement(bary));
        tr.gradient.push_back(L.displacement_gradient());
        break;
      }
      case Field::Multiplier: {
        const int m = dofs.multiplier_dof(edge);
        if (m < 0) throw DomainError("multiplier lives on interface edges");
        tr.scalar.push_back(values[dofs.offset(Field::Multiplier) + m]);
        break;
      }
    }
  }
  return tr;
}

}  // namespace sbfem
