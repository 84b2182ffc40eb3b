#pragma once

#include "sbfem/estimator.hpp"

#include <array>
#include <limits>
#include <memory>
#include <vector>

namespace sbfem {

enum ErrorComponent : int { kErrF, kErrP, kErrS, kErrPP, kErrFP, kErrLambda, kErrorComponentCount };

/// Column names: e_f, e_p, e_s, e_pp, e_fp, e_lambda.
const char* error_name(int component);

/// Squared spatial errors at one time level.
struct SpatialErrors {
  std::array<double, kErrorComponentCount> total{};
  std::vector<double> cell;  // per cell: all components living on the cell plus its interface edges
};

/// e_f in H1, e_p in L2, e_s in H1, e_pp in L2, e_fp in L2 (12-point rule)
/// and e_lambda as sum_E h_E ||lambda - lambda_h||^2_E.
SpatialErrors spatial_errors(const DofMap& dofs, const SystemState& state, const ManufacturedCase& exact);

struct ErrorReport {
  // e_f, e_p, e_fp, e_lambda: L2 in time; e_s, e_pp: max in time.
  std::array<double, kErrorComponentCount> norm{};
  double combined = 0;
  double effectivity = 0;  // Theta / combined, NaN when combined == 0
  std::vector<double> local;  // per cell, max over time of the squared local error
  int steps = 0;
};

/// Right-endpoint rectangle rule for the L2-in-time norms.
class ErrorAccumulator {
 public:
  ErrorAccumulator(const DofMap& dofs, std::shared_ptr<const ManufacturedCase> exact);

  void add_step(const SystemState& state, double dt);
  ErrorReport report(double theta = std::numeric_limits<double>::quiet_NaN()) const;

 private:
  const DofMap* dofs_;
  std::shared_ptr<const ManufacturedCase> exact_;
  std::array<double, kErrorComponentCount> acc_{};
  std::vector<double> local_;
  int steps_ = 0;
};

/// `history` holds the states at t_0 .. t_N. Throws DomainError when steps
/// are missing.
ErrorReport error_norms(const DofMap& dofs, const std::vector<SystemState>& history,
                        std::shared_ptr<const ManufacturedCase> exact, const TimeGrid& grid,
                        double theta = std::numeric_limits<double>::quiet_NaN());

/// Cell plus its edge neighbours (across the interface too), ascending ids.
std::vector<int> patch(const Mesh& mesh, int cell);

/// max_K Theta_K / (sqrt(sum_{omega_K} local error^2) + sum_{omega_K} zeta_K).
double efficiency_ratio(const Mesh& mesh, const EstimatorReport& estimate, const ErrorReport& errors);

/// log(e_coarse / e_fine) / log(h_coarse / h_fine); NaN when either error is
/// zero or not finite.
double observed_rate(double e_coarse, double e_fine, double h_coarse, double h_fine);

}  // namespace sbfem
