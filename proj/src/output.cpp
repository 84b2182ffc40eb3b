#include "sbfem/output.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>

namespace sbfem {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  return out;
}

namespace {

void write_points_and_cells(std::ostream& out, const Mesh& mesh) {
  out << "# vtk DataFile Version 3.0\nsbfem\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << mesh.n_vertices() << " double\n";
  for (const auto& x : mesh.vertices()) out << format_number(x.x()) << ' ' << format_number(x.y()) << " 0\n";
  out << "CELLS " << mesh.n_cells() << ' ' << 4 * mesh.n_cells() << '\n';
  for (const auto& c : mesh.cells()) out << "3 " << c.v[0] << ' ' << c.v[1] << ' ' << c.v[2] << '\n';
  out << "CELL_TYPES " << mesh.n_cells() << '\n';
  for (int c = 0; c < mesh.n_cells(); ++c) out << "5\n";
}

void scalars(std::ostream& out, const char* name, const std::vector<double>& v) {
  out << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
  for (double x : v) out << format_number(x) << '\n';
}

void vectors(std::ostream& out, const char* name, const std::vector<Vec2>& v) {
  out << "VECTORS " << name << " double\n";
  for (const auto& x : v) out << format_number(x.x()) << ' ' << format_number(x.y()) << " 0\n";
}

}  // namespace

void write_mesh_vtk(std::ostream& out, const Mesh& mesh) {
  write_points_and_cells(out, mesh);
  std::vector<double> sub(mesh.n_cells());
  for (int c = 0; c < mesh.n_cells(); ++c) sub[c] = static_cast<double>(mesh.subdomain(c));
  out << "CELL_DATA " << mesh.n_cells() << '\n';
  scalars(out, "subdomain", sub);
}

void write_vtk(std::ostream& out, const DofMap& dofs, const SystemState& state, const EstimatorReport* indicators) {
  const Mesh& mesh = dofs.mesh();
  write_points_and_cells(out, mesh);
  const int nv = mesh.n_vertices();
  std::vector<Vec2> u(nv, Vec2::Zero()), eta(nv, Vec2::Zero());
  std::vector<double> pf(nv, 0.0);
  const int ou = dofs.offset(Field::StokesVelocity), op = dofs.offset(Field::StokesPressure);
  const int oe = dofs.offset(Field::Displacement);
  for (int v = 0; v < nv; ++v) {
    if (const int n = dofs.fluid_vertex_node(v); n >= 0) {
      u[v] = Vec2(state.values[ou + 2 * n], state.values[ou + 2 * n + 1]);
      pf[v] = state.values[op + n];
    }
    if (const int n = dofs.porous_vertex_node(v); n >= 0) {
      eta[v] = Vec2(state.values[oe + 2 * n], state.values[oe + 2 * n + 1]);
    }
  }
  out << "POINT_DATA " << nv << '\n';
  vectors(out, "u_f", u);
  vectors(out, "eta_p", eta);
  scalars(out, "p_f", pf);

  const int nc = mesh.n_cells();
  std::vector<double> sub(nc), pp(nc, 0.0);
  for (int c = 0; c < nc; ++c) {
    sub[c] = static_cast<double>(mesh.subdomain(c));
    if (mesh.subdomain(c) == Subdomain::Porous)
      pp[c] = state.values[dofs.offset(Field::DarcyPressure) + dofs.darcy_pressure_dof(c)];
  }
  out << "CELL_DATA " << nc << '\n';
  scalars(out, "subdomain", sub);
  scalars(out, "p_p", pp);
  if (indicators) {
    if (static_cast<int>(indicators->cells.size()) != nc) throw DomainError("indicator table does not match the mesh");
    std::vector<double> col(nc);
    auto column = [&](const char* name, double ElementIndicator::*m) {
      for (int c = 0; c < nc; ++c) col[c] = indicators->cells[c].*m;
      scalars(out, name, col);
    };
    column("theta_f2", &ElementIndicator::theta_f2);
    column("theta_p2", &ElementIndicator::theta_p2);
    column("theta_pf2", &ElementIndicator::theta_pf2);
    column("zeta2", &ElementIndicator::zeta2);
  }
}

void write_indicator_csv(std::ostream& out, const EstimatorReport& report) {
  out << "cell_id,subdomain,h_K,theta_f2,theta_p2,theta_pf2,zeta2\n";
  for (const auto& k : report.cells) {
    out << k.cell << ',' << to_string(k.subdomain) << ',' << format_number(k.h) << ',' << format_number(k.theta_f2)
        << ',' << format_number(k.theta_p2) << ',' << format_number(k.theta_pf2) << ',' << format_number(k.zeta2)
        << '\n';
  }
}

void write_error_csv(std::ostream& out, const ErrorReport& errors, const EstimatorReport& estimate) {
  for (int c = 0; c < kErrorComponentCount; ++c) out << error_name(c) << ',';
  out << "combined,theta,zeta,effectivity\n";
  for (int c = 0; c < kErrorComponentCount; ++c) out << format_number(errors.norm[c]) << ',';
  out << format_number(errors.combined) << ',' << format_number(estimate.theta) << ',' << format_number(estimate.zeta)
      << ',' << format_number(errors.effectivity) << '\n';
}

void write_convergence_csv(std::ostream& out, const StudyResult& study) {
  out << "level,h,dt,dofs";
  for (int c = 0; c < kErrorComponentCount; ++c) out << ',' << error_name(c);
  out << ",combined";
  for (int c = 0; c < kErrorComponentCount; ++c) out << ",rate_" << error_name(c);
  out << ",rate_combined\n";
  for (std::size_t l = 0; l < study.rows.size(); ++l) {
    const auto& r = study.rows[l];
    out << r.level << ',' << format_number(r.h) << ',' << format_number(r.dt) << ',' << r.dofs;
    for (double e : r.err) out << ',' << format_number(e);
    out << ',' << format_number(r.combined);
    for (int c = 0; c <= kErrorComponentCount; ++c) {
      out << ',';
      if (l > 0) out << format_number(study.rates[l - 1][c]);
    }
    out << '\n';
  }
}

void write_effectivity_csv(std::ostream& out, const StudyResult& study) {
  out << "level,h,dofs,theta,zeta,error,effectivity,reliability,efficiency\n";
  for (const auto& r : study.rows) {
    out << r.level << ',' << format_number(r.h) << ',' << r.dofs << ',' << format_number(r.theta) << ','
        << format_number(r.zeta) << ',' << format_number(r.combined) << ',' << format_number(r.effectivity) << ','
        << format_number(r.reliability) << ',' << format_number(r.efficiency) << '\n';
  }
}

std::string adapt_log_line(const AdaptRecord& record, bool timing) {
  nlohmann::ordered_json j;
  j["iter"] = record.iter;
  j["dofs"] = record.run.dofs;
  j["cells"] = record.run.cells;
  j["theta"] = record.run.estimate.theta;
  j["zeta"] = record.run.estimate.zeta;
  if (record.run.errors) {
    for (int c = 0; c < kErrorComponentCount; ++c) j[error_name(c)] = record.run.errors->norm[c];
    j["combined"] = record.run.errors->combined;
  }
  j["marked"] = record.marked.size();
  j["wall_ms"] = timing ? record.run.wall_ms : 0.0;
  return j.dump();
}

}  // namespace sbfem
