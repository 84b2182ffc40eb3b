#pragma once

#include "sbfem/types.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sbfem {

struct PhysicalParams {
  double mu = 1;         // fluid viscosity
  Mat2 K = Mat2::Identity();
  double lambda_p = 1;   // Lame parameters of the skeleton
  double mu_p = 1;
  double alpha = 1;      // Biot-Willis coefficient
  double s0 = 1;         // storage coefficient
  double alpha_bjs = 1;  // slip friction coefficient

  /// Throws ParameterError on any violated sign or definiteness constraint.
  void validate() const;
};

/// tau^T K tau for a unit tangent.
double K_tangential(const PhysicalParams& params, const Vec2& tau);

/// Friction factor mu * alpha_BJS / sqrt(tau^T K tau).
double bjs_coefficient(const PhysicalParams& params, const Vec2& tau);

/// Interface tangent used throughout: n_f rotated counterclockwise.
inline Vec2 interface_tangent(const Vec2& n_f) { return {-n_f.y(), n_f.x()}; }

template <typename S>
Eigen::Matrix<S, 2, 2> stress_stokes(const PhysicalParams& params, const Eigen::Matrix<S, 2, 2>& grad_u, const S& p) {
  return -p * Eigen::Matrix<S, 2, 2>::Identity() + params.mu * (grad_u + grad_u.transpose());
}

template <typename S>
Eigen::Matrix<S, 2, 2> stress_elastic(const PhysicalParams& params, const Eigen::Matrix<S, 2, 2>& grad_eta) {
  return params.lambda_p * grad_eta.trace() * Eigen::Matrix<S, 2, 2>::Identity() +
         params.mu_p * (grad_eta + grad_eta.transpose());
}

template <typename S>
Eigen::Matrix<S, 2, 2> stress_poroelastic(const PhysicalParams& params, const Eigen::Matrix<S, 2, 2>& grad_eta,
                                          const S& p) {
  return stress_elastic(params, grad_eta) - params.alpha * p * Eigen::Matrix<S, 2, 2>::Identity();
}

// key=value parameter files: mu, k11, k12, k22, lambda_p, mu_p, alpha, s0,
// alpha_bjs, T, dt. '#' starts a comment.
struct ParamsFile {
  PhysicalParams physical;
  std::optional<double> T;
  std::optional<double> dt;
};

void set_param(ParamsFile& file, std::string_view key, std::string_view value);
ParamsFile parse_params(std::string_view text);
ParamsFile read_params_file(const std::string& path);

// Closed-form building blocks for manufactured solutions.

/// One-dimensional function with derivatives of any order:
/// polynomial sum c_k s^k, sin(a s + b), or exp(a s + b).
class Profile {
 public:
  static Profile polynomial(std::vector<double> coeffs);
  static Profile constant(double c) { return polynomial({c}); }
  static Profile sine(double a, double b = 0);
  static Profile cosine(double a, double b = 0);
  static Profile exponential(double a, double b = 0);

  double operator()(double s, int order = 0) const;

 private:
  enum class Kind { Polynomial, Sine, Exponential };
  Kind kind_ = Kind::Polynomial;
  std::vector<double> coeffs_{0.0};
  double a_ = 0, b_ = 0;
};

/// c * X(x) * Y(y) * T(t)
struct SeparableTerm {
  double c = 1;
  Profile X, Y, T;
};

class SpaceTimeField {
 public:
  SpaceTimeField() = default;
  SpaceTimeField(std::initializer_list<SeparableTerm> terms) : terms_(terms) {}

  SpaceTimeField& operator+=(const SeparableTerm& term) {
    terms_.push_back(term);
    return *this;
  }

  /// d^i/dx^i d^j/dy^j d^k/dt^k
  double derivative(const Vec2& x, double t, int i, int j, int k = 0) const;

  double value(const Vec2& x, double t) const { return derivative(x, t, 0, 0); }
  Vec2 gradient(const Vec2& x, double t, int k = 0) const;
  Mat2 hessian(const Vec2& x, double t, int k = 0) const;

 private:
  std::vector<SeparableTerm> terms_;
};

using ScalarFn = std::function<double(const Vec2&, double)>;
using VectorFn = std::function<Vec2(const Vec2&, double)>;
// Interface data also receive the fluid-side outward unit normal.
using InterfaceScalarFn = std::function<double(const Vec2&, double, const Vec2&)>;
using InterfaceVectorFn = std::function<Vec2(const Vec2&, double, const Vec2&)>;

/// Sources, boundary, interface and initial data.
///
/// Boundary values: u_f on Gamma_f, eta_p on Gamma_p, the Darcy flux on
/// Gamma_p^N (through u_p), and the natural pressure on Gamma_p^D. The
/// interface data g1..g4 are the right-hand sides of the interface
/// conditions written as residuals:
///   g1 = u_f.n_f + (d_t eta + u_p).n_p
///   g2 = p_p + (sigma_f n_f).n_f
///   g3 = sigma_f n_f + sigma_p n_p
///   g4 = (sigma_f n_f).tau + gamma (u_f - d_t eta).tau
struct ProblemData {
  VectorFn f_f, f_p;
  ScalarFn q_f, q_p;
  VectorFn u_f_boundary, eta_boundary, u_p_boundary;
  ScalarFn p_p_boundary;
  InterfaceScalarFn g1, g2, g4;
  InterfaceVectorFn g3;
  ScalarFn p_p0;
  VectorFn eta0;
};

ProblemData zero_data();

/// Exact fields plus the data they generate.
///
/// The Darcy velocity is derived from the pressure, u_p = -K grad p_p / mu,
/// so the Darcy law holds exactly.
class ManufacturedCase {
 public:
  ManufacturedCase(std::string name, PhysicalParams params, SpaceTimeField u1, SpaceTimeField u2,
                   SpaceTimeField p_f, SpaceTimeField p_p, SpaceTimeField eta1, SpaceTimeField eta2);

  const std::string& name() const { return name_; }
  const PhysicalParams& params() const { return params_; }

  Vec2 u_f(const Vec2& x, double t) const;
  Mat2 grad_u_f(const Vec2& x, double t) const;
  double p_f(const Vec2& x, double t) const;
  Vec2 u_p(const Vec2& x, double t) const;
  double div_u_p(const Vec2& x, double t) const;
  double p_p(const Vec2& x, double t) const;
  Vec2 eta(const Vec2& x, double t) const;
  Vec2 eta_rate(const Vec2& x, double t) const;
  Mat2 grad_eta(const Vec2& x, double t) const;
  double lambda(const Vec2& x, double t, const Vec2& n_f) const;

  Mat2 sigma_f(const Vec2& x, double t) const;
  Mat2 sigma_p(const Vec2& x, double t) const;

  Vec2 f_f(const Vec2& x, double t) const;
  double q_f(const Vec2& x, double t) const;
  Vec2 f_p(const Vec2& x, double t) const;
  double q_p(const Vec2& x, double t) const;

  double g1(const Vec2& x, double t, const Vec2& n_f) const;
  double g2(const Vec2& x, double t, const Vec2& n_f) const;
  Vec2 g3(const Vec2& x, double t, const Vec2& n_f) const;
  double g4(const Vec2& x, double t, const Vec2& n_f) const;

  ProblemData data() const;

 private:
  std::string name_;
  PhysicalParams params_;
  SpaceTimeField u1_, u2_, pf_, pp_, e1_, e2_;
};

struct Problem {
  std::string name;
  PhysicalParams params;
  ProblemData data;
  std::shared_ptr<const ManufacturedCase> exact;  // null without a closed form
};

/// Shipped cases: "builtin-smooth", "builtin-polynomial", "builtin-layer",
/// "zero". Throws ParameterError for unknown names.
Problem builtin_problem(std::string_view name, const PhysicalParams& params = {});

/// The smooth trigonometric case on the split unit square.
ManufacturedCase builtin_mms_case(const PhysicalParams& params = {});

/// Fields inside the discrete spaces with a multiplier constant along
/// y = 0.5: the discrete solution reproduces them exactly.
ManufacturedCase polynomial_case(const PhysicalParams& params = {});

/// Porous pressure and displacement with an exponential boundary layer of
/// width `delta` below y = 0.5.
ManufacturedCase layer_case(const PhysicalParams& params = {}, double delta = 0.02);

}  // namespace sbfem
