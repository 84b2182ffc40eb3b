#include "sbfem/quadrature.hpp"

#include <cmath>

namespace sbfem {

namespace {

void add_s3_orbit(QuadratureRule& r, double a, double w) {
  const double b = 1 - 2 * a;
  for (const Vec3& p : {Vec3(a, a, b), Vec3(a, b, a), Vec3(b, a, a)}) {
    r.points.push_back(p);
    r.weights.push_back(w);
  }
}

void add_c3_orbit(QuadratureRule& r, double a, double b, double w) {
  const double c = 1 - a - b;
  for (const Vec3& p : {Vec3(a, b, c), Vec3(b, c, a), Vec3(c, a, b)}) {
    r.points.push_back(p);
    r.weights.push_back(w);
  }
}

QuadratureRule make_centroid() {
  QuadratureRule r;
  r.points.push_back(Vec3::Constant(1.0 / 3.0));
  r.weights.push_back(1.0);
  r.degree = 1;
  return r;
}

QuadratureRule make_three_point() {
  QuadratureRule r;
  add_s3_orbit(r, 1.0 / 6.0, 1.0 / 3.0);
  r.degree = 2;
  return r;
}

QuadratureRule make_six_point() {
  QuadratureRule r;
  add_s3_orbit(r, 0.44594849091596506, 0.22338158967801183);
  add_s3_orbit(r, 0.091576213509770507, 0.10995174365532151);
  r.degree = 4;
  return r;
}

// Gatermann's rotationally symmetric 12-point rule.
QuadratureRule make_twelve_point() {
  QuadratureRule r;
  add_c3_orbit(r, 0.66094919618671832, 0.034324302945110609, 0.057550085569978759);
  add_c3_orbit(r, 0.87009986783168458, 0.067517867073913038, 0.053034056314870709);
  add_c3_orbit(r, 0.27771616697638879, 0.51584233435357785, 0.13498637401958938);
  add_c3_orbit(r, 0.055225456656929829, 0.62327204949109916, 0.08776281742889451);
  r.degree = 7;
  return r;
}

}  // namespace

const QuadratureRule& triangle_rule(int degree) {
  static const QuadratureRule centroid = make_centroid();
  static const QuadratureRule three = make_three_point();
  static const QuadratureRule six = make_six_point();
  static const QuadratureRule twelve = make_twelve_point();
  if (degree <= 1) return centroid;
  if (degree == 2) return three;
  if (degree <= 4) return six;
  if (degree <= 7) return twelve;
  throw DomainError("no triangle rule exact beyond degree 7");
}

const EdgeQuadratureRule& edge_rule() {
  static const EdgeQuadratureRule rule = [] {
    EdgeQuadratureRule r;
    const double g = std::sqrt(3.0 / 5.0);
    r.points = {0.5 * (1 - g), 0.5, 0.5 * (1 + g)};
    r.weights = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};
    r.degree = 5;
    return r;
  }();
  return rule;
}

}  // namespace sbfem
