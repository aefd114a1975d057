// Order-3 univariate jets (truncated Taylor arithmetic).
//
// A Jet3 carries a function value together with its first three derivatives
// at a point, propagated exactly through arithmetic, exp, sqrt, pow, and
// composition (Faa di Bruno through order 3).  Special-function evaluators
// use jets to deliver radial profiles with analytically consistent
// derivatives, which keeps equation residual checks free of stencil noise.
#pragma once

#include <cmath>

#include "qhydro/errors.hpp"

namespace qhydro {

struct Jet3 {
  double f = 0.0;   // value
  double f1 = 0.0;  // first derivative
  double f2 = 0.0;  // second derivative
  double f3 = 0.0;  // third derivative

  static Jet3 constant(double c) { return {c, 0.0, 0.0, 0.0}; }
  static Jet3 variable(double x) { return {x, 1.0, 0.0, 0.0}; }
};

inline Jet3 operator+(const Jet3& a, const Jet3& b) {
  return {a.f + b.f, a.f1 + b.f1, a.f2 + b.f2, a.f3 + b.f3};
}
inline Jet3 operator-(const Jet3& a, const Jet3& b) {
  return {a.f - b.f, a.f1 - b.f1, a.f2 - b.f2, a.f3 - b.f3};
}
inline Jet3 operator-(const Jet3& a) { return {-a.f, -a.f1, -a.f2, -a.f3}; }

// Leibniz rule through order 3.
inline Jet3 operator*(const Jet3& a, const Jet3& b) {
  return {a.f * b.f,
          a.f1 * b.f + a.f * b.f1,
          a.f2 * b.f + 2.0 * a.f1 * b.f1 + a.f * b.f2,
          a.f3 * b.f + 3.0 * a.f2 * b.f1 + 3.0 * a.f1 * b.f2 + a.f * b.f3};
}
inline Jet3 operator*(double c, const Jet3& a) { return {c * a.f, c * a.f1, c * a.f2, c * a.f3}; }
inline Jet3 operator*(const Jet3& a, double c) { return c * a; }

// Quotient q = a/b, solving the Leibniz relations for q's derivatives.
inline Jet3 operator/(const Jet3& a, const Jet3& b) {
  if (b.f == 0.0) raise("NonFinite", "jet division by zero value");
  Jet3 q;
  q.f = a.f / b.f;
  q.f1 = (a.f1 - q.f * b.f1) / b.f;
  q.f2 = (a.f2 - q.f * b.f2 - 2.0 * q.f1 * b.f1) / b.f;
  q.f3 = (a.f3 - q.f * b.f3 - 3.0 * q.f1 * b.f2 - 3.0 * q.f2 * b.f1) / b.f;
  return q;
}
inline Jet3 operator/(const Jet3& a, double c) { return a * (1.0 / c); }

// Composition h = f(g): Faa di Bruno through order 3, where `fd` holds the
// derivatives of f evaluated at g.f (fd.f = f(g.f), fd.f1 = f'(g.f), ...).
inline Jet3 jet_compose(const Jet3& fd, const Jet3& g) {
  Jet3 h;
  h.f = fd.f;
  h.f1 = fd.f1 * g.f1;
  h.f2 = fd.f2 * g.f1 * g.f1 + fd.f1 * g.f2;
  h.f3 = fd.f3 * g.f1 * g.f1 * g.f1 + 3.0 * fd.f2 * g.f1 * g.f2 + fd.f1 * g.f3;
  return h;
}

inline Jet3 jet_exp(const Jet3& g) {
  const double e = std::exp(g.f);
  Jet3 fd{e, e, e, e};
  return jet_compose(fd, g);
}

inline Jet3 jet_pow(const Jet3& g, double alpha) {
  if (g.f <= 0.0) raise("NonFinite", "jet power of non-positive base");
  const double p = std::pow(g.f, alpha);
  Jet3 fd{p, alpha * p / g.f, alpha * (alpha - 1.0) * p / (g.f * g.f),
          alpha * (alpha - 1.0) * (alpha - 2.0) * p / (g.f * g.f * g.f)};
  return jet_compose(fd, g);
}

inline Jet3 jet_sqrt(const Jet3& g) { return jet_pow(g, 0.5); }

inline Jet3 jet_cos(const Jet3& g) {
  const double c = std::cos(g.f), s = std::sin(g.f);
  Jet3 fd{c, -s, -c, s};
  return jet_compose(fd, g);
}

inline Jet3 jet_sin(const Jet3& g) {
  const double c = std::cos(g.f), s = std::sin(g.f);
  Jet3 fd{s, c, -s, -c};
  return jet_compose(fd, g);
}

inline Jet3 jet_log(const Jet3& g) {
  if (g.f <= 0.0) raise("NonFinite", "jet log of non-positive value");
  const double x = g.f;
  Jet3 fd{std::log(x), 1.0 / x, -1.0 / (x * x), 2.0 / (x * x * x)};
  return jet_compose(fd, g);
}

}  // namespace qhydro
