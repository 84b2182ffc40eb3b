#pragma once

#include "sbfem/adapt.hpp"

#include <fstream>
#include <ostream>
#include <string>

namespace sbfem {

/// Shortest round-trip text ("%.17g"); nan and inf spelled out.
std::string format_number(double v);

/// Opens for writing or throws IoError.
std::ofstream open_output(const std::string& path);

/// VTK legacy ASCII unstructured grid. Point data u_f, eta_p, p_f (zero
/// outside their subdomain); cell data subdomain, p_p and, when an
/// indicator table is given, theta_f2, theta_p2, theta_pf2, zeta2.
void write_vtk(std::ostream& out, const DofMap& dofs, const SystemState& state,
               const EstimatorReport* indicators = nullptr);
void write_mesh_vtk(std::ostream& out, const Mesh& mesh);

void write_indicator_csv(std::ostream& out, const EstimatorReport& report);

/// One row: the error components, combined norm, Theta, zeta, effectivity.
void write_error_csv(std::ostream& out, const ErrorReport& errors, const EstimatorReport& estimate);

void write_convergence_csv(std::ostream& out, const StudyResult& study);
void write_effectivity_csv(std::ostream& out, const StudyResult& study);

/// {iter, dofs, cells, theta, zeta, e_f, ..., combined, wall_ms}; wall_ms is
/// written as 0 when `timing` is false.
std::string adapt_log_line(const AdaptRecord& record, bool timing = true);

template <typename Writer>
void write_file(const std::string& path, Writer&& writer) {
  auto out = open_output(path);
  writer(out);
  out.flush();
  if (!out) throw IoError("failed writing " + path);
}

}  // namespace sbfem
