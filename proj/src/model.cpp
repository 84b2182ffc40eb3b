#include "sbfem/model.hpp"

#include <Eigen/Eigenvalues>

#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace sbfem {

void PhysicalParams::validate() const {
  const auto finite = [](double v) { return std::isfinite(v); };
  if (!finite(mu) || mu <= 0) throw ParameterError("mu must be positive");
  if (!K.allFinite()) throw ParameterError("K must be finite");
  if (std::abs(K(0, 1) - K(1, 0)) > 1e-12 * K.norm()) throw ParameterError("K must be symmetric");
  const Eigen::SelfAdjointEigenSolver<Mat2> eig(K, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() <= 0) throw ParameterError("K must be positive definite");
  if (!finite(lambda_p) || lambda_p <= 0) throw ParameterError("lambda_p must be positive");
  if (!finite(mu_p) || mu_p <= 0) throw ParameterError("mu_p must be positive");
  if (!finite(alpha) || alpha < 0 || alpha > 1) throw ParameterError("alpha must lie in [0, 1]");
  if (!finite(s0) || s0 < 0) throw ParameterError("s0 must be non-negative");
  if (!finite(alpha_bjs) || alpha_bjs < 0) throw ParameterError("alpha_bjs must be non-negative");
}

double K_tangential(const PhysicalParams& params, const Vec2& tau) {
  if (std::abs(tau.norm() - 1) > 1e-12) throw DomainError("tangent must be a unit vector");
  return tau.dot(params.K * tau);
}

double bjs_coefficient(const PhysicalParams& params, const Vec2& tau) {
  return params.mu * params.alpha_bjs / std::sqrt(K_tangential(params, tau));
}

void set_param(ParamsFile& file, std::string_view key, std::string_view value) {
  double v = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || ptr != value.data() + value.size())
    throw ParameterError("bad value for '" + std::string(key) + "': '" + std::string(value) + "'");
  PhysicalParams& p = file.physical;
  if (key == "mu") p.mu = v;
  else if (key == "k11") p.K(0, 0) = v;
  else if (key == "k12") p.K(0, 1) = p.K(1, 0) = v;
  else if (key == "k22") p.K(1, 1) = v;
  else if (key == "lambda_p") p.lambda_p = v;
  else if (key == "mu_p") p.mu_p = v;
  else if (key == "alpha") p.alpha = v;
  else if (key == "s0") p.s0 = v;
  else if (key == "alpha_bjs") p.alpha_bjs = v;
  else if (key == "T") file.T = v;
  else if (key == "dt") file.dt = v;
  else throw ParameterError("unknown parameter '" + std::string(key) + "'");
}

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

ParamsFile parse_params(std::string_view text) {
  ParamsFile file;
  int line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ParameterError("line " + std::to_string(line_no) + ": expected key=value");
    set_param(file, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  file.physical.validate();
  return file;
}

ParamsFile read_params_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open parameter file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_params(ss.str());
}

Profile Profile::polynomial(std::vector<double> coeffs) {
  Profile p;
  p.kind_ = Kind::Polynomial;
  p.coeffs_ = coeffs.empty() ? std::vector<double>{0.0} : std::move(coeffs);
  return p;
}

Profile Profile::sine(double a, double b) {
  Profile p;
  p.kind_ = Kind::Sine;
  p.a_ = a;
  p.b_ = b;
  return p;
}

Profile Profile::cosine(double a, double b) { return sine(a, b + std::numbers::pi / 2); }

Profile Profile::exponential(double a, double b) {
  Profile p;
  p.kind_ = Kind::Exponential;
  p.a_ = a;
  p.b_ = b;
  return p;
}

double Profile::operator()(double s, int order) const {
  switch (kind_) {
    case Kind::Polynomial: {
      double sum = 0;
      for (int k = static_cast<int>(coeffs_.size()) - 1; k >= order; --k) {
        double f = coeffs_[k];
        for (int m = 0; m < order; ++m) f *= k - m;
        sum = sum * s + f;
      }
      return sum;
    }
    case Kind::Sine: return std::pow(a_, order) * std::sin(a_ * s + b_ + order * std::numbers::pi / 2);
    case Kind::Exponential: return std::pow(a_, order) * std::exp(a_ * s + b_);
  }
  return 0;
}

double SpaceTimeField::derivative(const Vec2& x, double t, int i, int j, int k) const {
  double sum = 0;
  for (const auto& term : terms_) sum += term.c * term.X(x.x(), i) * term.Y(x.y(), j) * term.T(t, k);
  return sum;
}

Vec2 SpaceTimeField::gradient(const Vec2& x, double t, int k) const {
  return {derivative(x, t, 1, 0, k), derivative(x, t, 0, 1, k)};
}

Mat2 SpaceTimeField::hessian(const Vec2& x, double t, int k) const {
  const double xy = derivative(x, t, 1, 1, k);
  Mat2 h;
  h << derivative(x, t, 2, 0, k), xy, xy, derivative(x, t, 0, 2, k);
  return h;
}

ProblemData zero_data() {
  ProblemData d;
  const auto zs = [](const Vec2&, double) { return 0.0; };
  const auto zv = [](const Vec2&, double) { return Vec2(Vec2::Zero()); };
  const auto izs = [](const Vec2&, double, const Vec2&) { return 0.0; };
  d.f_f = d.f_p = d.u_f_boundary = d.eta_boundary = d.u_p_boundary = d.eta0 = zv;
  d.q_f = d.q_p = d.p_p_boundary = d.p_p0 = zs;
  d.g1 = d.g2 = d.g4 = izs;
  d.g3 = [](const Vec2&, double, const Vec2&) { return Vec2(Vec2::Zero()); };
  return d;
}

ManufacturedCase::ManufacturedCase(std::string name, PhysicalParams params, SpaceTimeField u1, SpaceTimeField u2,
                                   SpaceTimeField p_f, SpaceTimeField p_p, SpaceTimeField eta1, SpaceTimeField eta2)
    : name_(std::move(name)),
      params_(params),
      u1_(std::move(u1)),
      u2_(std::move(u2)),
      pf_(std::move(p_f)),
      pp_(std::move(p_p)),
      e1_(std::move(eta1)),
      e2_(std::move(eta2)) {
  params_.validate();
}

Vec2 ManufacturedCase::u_f(const Vec2& x, double t) const { return {u1_.value(x, t), u2_.value(x, t)}; }

Mat2 ManufacturedCase::grad_u_f(const Vec2& x, double t) const {
  Mat2 g;
  g.row(0) = u1_.gradient(x, t).transpose();
  g.row(1) = u2_.gradient(x, t).transpose();
  return g;
}

double ManufacturedCase::p_f(const Vec2& x, double t) const { return pf_.value(x, t); }

Vec2 ManufacturedCase::u_p(const Vec2& x, double t) const { return -params_.K * pp_.gradient(x, t) / params_.mu; }

double ManufacturedCase::div_u_p(const Vec2& x, double t) const {
  return -params_.K.cwiseProduct(pp_.hessian(x, t)).sum() / params_.mu;
}

double ManufacturedCase::p_p(const Vec2& x, double t) const { return pp_.value(x, t); }

Vec2 ManufacturedCase::eta(const Vec2& x, double t) const { return {e1_.value(x, t), e2_.value(x, t)}; }

Vec2 ManufacturedCase::eta_rate(const Vec2& x, double t) const {
  return {e1_.derivative(x, t, 0, 0, 1), e2_.derivative(x, t, 0, 0, 1)};
}

Mat2 ManufacturedCase::grad_eta(const Vec2& x, double t) const {
  Mat2 g;
  g.row(0) = e1_.gradient(x, t).transpose();
  g.row(1) = e2_.gradient(x, t).transpose();
  return g;
}

Mat2 ManufacturedCase::sigma_f(const Vec2& x, double t) const {
  return stress_stokes(params_, grad_u_f(x, t), p_f(x, t));
}

Mat2 ManufacturedCase::sigma_p(const Vec2& x, double t) const {
  return stress_poroelastic(params_, grad_eta(x, t), p_p(x, t));
}

double ManufacturedCase::lambda(const Vec2& x, double t, const Vec2& n_f) const {
  return -n_f.dot(sigma_f(x, t) * n_f);
}

Vec2 ManufacturedCase::f_f(const Vec2& x, double t) const {
  // f_f = grad p - mu (lap u + grad div u)
  const Mat2 h1 = u1_.hessian(x, t), h2 = u2_.hessian(x, t);
  const Vec2 lap(h1.trace(), h2.trace());
  const Vec2 grad_div(h1(0, 0) + h2(0, 1), h1(0, 1) + h2(1, 1));
  return pf_.gradient(x, t) - params_.mu * (lap + grad_div);
}

double ManufacturedCase::q_f(const Vec2& x, double t) const { return grad_u_f(x, t).trace(); }

Vec2 ManufacturedCase::f_p(const Vec2& x, double t) const {
  const Mat2 h1 = e1_.hessian(x, t), h2 = e2_.hessian(x, t);
  const Vec2 lap(h1.trace(), h2.trace());
  const Vec2 grad_div(h1(0, 0) + h2(0, 1), h1(0, 1) + h2(1, 1));
  return -(params_.lambda_p + params_.mu_p) * grad_div - params_.mu_p * lap + params_.alpha * pp_.gradient(x, t);
}

double ManufacturedCase::q_p(const Vec2& x, double t) const {
  const double div_rate = e1_.derivative(x, t, 1, 0, 1) + e2_.derivative(x, t, 0, 1, 1);
  return params_.s0 * pp_.derivative(x, t, 0, 0, 1) + params_.alpha * div_rate + div_u_p(x, t);
}

double ManufacturedCase::g1(const Vec2& x, double t, const Vec2& n_f) const {
  return u_f(x, t).dot(n_f) - (eta_rate(x, t) + u_p(x, t)).dot(n_f);
}

double ManufacturedCase::g2(const Vec2& x, double t, const Vec2& n_f) const {
  return p_p(x, t) + n_f.dot(sigma_f(x, t) * n_f);
}

Vec2 ManufacturedCase::g3(const Vec2& x, double t, const Vec2& n_f) const {
  return sigma_f(x, t) * n_f - sigma_p(x, t) * n_f;
}

double ManufacturedCase::g4(const Vec2& x, double t, const Vec2& n_f) const {
  const Vec2 tau = interface_tangent(n_f);
  return (sigma_f(x, t) * n_f).dot(tau) + bjs_coefficient(params_, tau) * (u_f(x, t) - eta_rate(x, t)).dot(tau);
}

ProblemData ManufacturedCase::data() const {
  auto self = std::make_shared<const ManufacturedCase>(*this);
  ProblemData d;
  d.f_f = [self](const Vec2& x, double t) { return self->f_f(x, t); };
  d.f_p = [self](const Vec2& x, double t) { return self->f_p(x, t); };
  d.q_f = [self](const Vec2& x, double t) { return self->q_f(x, t); };
  d.q_p = [self](const Vec2& x, double t) { return self->q_p(x, t); };
  d.u_f_boundary = [self](const Vec2& x, double t) { return self->u_f(x, t); };
  d.eta_boundary = [self](const Vec2& x, double t) { return self->eta(x, t); };
  d.u_p_boundary = [self](const Vec2& x, double t) { return self->u_p(x, t); };
  d.p_p_boundary = [self](const Vec2& x, double t) { return self->p_p(x, t); };
  d.g1 = [self](const Vec2& x, double t, const Vec2& n) { return self->g1(x, t, n); };
  d.g2 = [self](const Vec2& x, double t, const Vec2& n) { return self->g2(x, t, n); };
  d.g3 = [self](const Vec2& x, double t, const Vec2& n) { return self->g3(x, t, n); };
  d.g4 = [self](const Vec2& x, double t, const Vec2& n) { return self->g4(x, t, n); };
  d.p_p0 = [self](const Vec2& x, double) { return self->p_p(x, 0); };
  d.eta0 = [self](const Vec2& x, double) { return self->eta(x, 0); };
  return d;
}

namespace {

using P = Profile;
constexpr double pi = std::numbers::pi;

SeparableTerm term(double c, P X, P Y, P T) { return {c, std::move(X), std::move(Y), std::move(T)}; }

}  // namespace

ManufacturedCase builtin_mms_case(const PhysicalParams& params) {
  const P et = P::exponential(1);
  const P one = P::constant(1), s = P::polynomial({0, 1});
  SpaceTimeField u1{term(1, P::sine(pi), P::cosine(pi), et)};
  SpaceTimeField u2{term(-1, P::cosine(pi), P::sine(pi), et), term(1, s, s, et)};
  SpaceTimeField pf{term(1, P::cosine(pi), P::cosine(pi), et)};
  SpaceTimeField pp{term(1, P::sine(pi), P::sine(pi), et), term(0.5, s, one, et)};
  SpaceTimeField e1{term(0.5, P::sine(pi), P::cosine(pi), et)};
  SpaceTimeField e2{term(0.5, P::cosine(pi), P::sine(pi), et), term(0.2, P::polynomial({0, 0, 1}), one, et)};
  return {"builtin-smooth", params, u1, u2, pf, pp, e1, e2};
}

ManufacturedCase polynomial_case(const PhysicalParams& params) {
  const P lin_t = P::polynomial({1, 1});
  const P one = P::constant(1), s = P::polynomial({0, 1});
  // div u_f = 0 and sigma_yy = -y, so the multiplier is constant on y = 0.5.
  SpaceTimeField u1{term(1, P::polynomial({0, 0, 1}), one, lin_t), term(1, one, s, lin_t)};
  SpaceTimeField u2{term(-2, s, s, lin_t), term(1, s, one, lin_t)};
  SpaceTimeField pf{term(-4 * params.mu, s, one, lin_t), term(1, one, s, lin_t)};
  SpaceTimeField pp{term(0.7, one, one, lin_t)};
  SpaceTimeField e1{term(0.1, s, one, lin_t), term(0.2, one, s, lin_t)};
  SpaceTimeField e2{term(-0.1, s, one, lin_t), term(0.3, one, s, lin_t)};
  return {"builtin-polynomial", params, u1, u2, pf, pp, e1, e2};
}

ManufacturedCase layer_case(const PhysicalParams& params, double delta) {
  if (!(delta > 0)) throw ParameterError("layer width must be positive");
  const P lin_t = P::polynomial({1, 1});
  const P one = P::constant(1), s = P::polynomial({0, 1});
  const P layer = P::exponential(1 / delta, -0.5 / delta);
  SpaceTimeField u1{term(1, P::sine(pi), P::cosine(pi), lin_t)};
  SpaceTimeField u2{term(-1, P::cosine(pi), P::sine(pi), lin_t)};
  SpaceTimeField pf{term(1, P::cosine(pi), P::cosine(pi), lin_t)};
  SpaceTimeField pp{term(1, one, layer, lin_t), term(0.5, s, layer, lin_t)};
  SpaceTimeField e1{term(delta, P::sine(pi), layer, lin_t)};
  SpaceTimeField e2{term(delta, s, layer, lin_t)};
  return {"builtin-layer", params, u1, u2, pf, pp, e1, e2};
}

Problem builtin_problem(std::string_view name, const PhysicalParams& params) {
  params.validate();
  Problem problem;
  problem.name = std::string(name);
  problem.params = params;
  std::shared_ptr<const ManufacturedCase> exact;
  if (name == "builtin-smooth") exact = std::make_shared<const ManufacturedCase>(builtin_mms_case(params));
  else if (name == "builtin-polynomial") exact = std::make_shared<const ManufacturedCase>(polynomial_case(params));
  else if (name == "builtin-layer") exact = std::make_shared<const ManufacturedCase>(layer_case(params));
  else if (name != "zero") throw ParameterError("unknown case '" + std::string(name) + "'");
  problem.data = exact ? exact->data() : zero_data();
  problem.exact = exact;
  return problem;
}

}  // namespace sbfem
