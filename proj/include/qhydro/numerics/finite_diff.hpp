// Central finite-difference stencils for scalar and vector fields on R^3.
//
// Second- and fourth-order variants are provided; the fourth-order stencils
// are used where residuals must resolve 1e-6 scales (truncation ~h^4 and
// roundoff ~eps/h balance near h ~ 1e-2 for O(1) fields).  Before applying a
// stencil near a field's singular set, call ensure_stencil_clear so that no
// sample lands inside the excluded neighbourhood.
#pragma once

#include <cmath>
#include <functional>
#include <string>

#include "qhydro/errors.hpp"
#include "qhydro/numerics/grid.hpp"

namespace qhydro {

using ScalarField = std::function<double(const Vec3&)>;
using VectorField = std::function<Vec3(const Vec3&)>;

struct FdConfig {
  double step = 1e-3;
  int order = 2;  // 2 or 4
};

// Throws ("StencilTouchesSingularSet") if any sample point of a stencil of
// the given half-width would come closer than `clearance` to the singular set.
inline void ensure_stencil_clear(const Vec3& p, double halfwidth, SingularSet s,
                                 double clearance) {
  if (s == SingularSet::None) return;
  const double d = distance_to_singular(p, s);
  if (d - halfwidth < clearance)
    raise("StencilTouchesSingularSet",
          "finite-difference stencil at distance " + std::to_string(d) +
              " with halfwidth " + std::to_string(halfwidth) +
              " violates clearance " + std::to_string(clearance));
}

namespace fdetail {

inline double d1(const std::function<double(double)>& g, double h, int order) {
  if (order >= 4)
    return (-g(2 * h) + 8 * g(h) - 8 * g(-h) + g(-2 * h)) / (12 * h);
  return (g(h) - g(-h)) / (2 * h);
}

inline double d2(const std::function<double(double)>& g, double h, int order) {
  if (order >= 4)
    return (-g(2 * h) + 16 * g(h) - 30 * g(0) + 16 * g(-h) - g(-2 * h)) /
           (12 * h * h);
  return (g(h) - 2 * g(0) + g(-h)) / (h * h);
}

}  // namespace fdetail

inline Vec3 fd_gradient(const ScalarField& f, const Vec3& p, const FdConfig& c = {}) {
  Vec3 g;
  for (int d = 0; d < 3; ++d) {
    auto line = [&](double t) {
      Vec3 q = p;
      q[d] += t;
      return f(q);
    };
    g[d] = fdetail::d1(line, c.step, c.order);
  }
  return g;
}

inline double fd_laplacian(const ScalarField& f, const Vec3& p, const FdConfig& c = {}) {
  double lap = 0.0;
  for (int d = 0; d < 3; ++d) {
    auto line = [&](double t) {
      Vec3 q = p;
      q[d] += t;
      return f(q);
    };
    lap += fdetail::d2(line, c.step, c.order);
  }
  return lap;
}

// Laplacian restricted to the first `dim` coordinates (planar fields).
inline double fd_laplacian_dim(const ScalarField& f, const Vec3& p, int dim,
                               const FdConfig& c = {}) {
  double lap = 0.0;
  for (int d = 0; d < dim; ++d) {
    auto line = [&](double t) {
      Vec3 q = p;
      q[d] += t;
      return f(q);
    };
    lap += fdetail::d2(line, c.step, c.order);
  }
  return lap;
}

// Jacobian J_ij = d v_i / d x_j.
inline Mat3 fd_jacobian(const VectorField& v, const Vec3& p, const FdConfig& c = {}) {
  Mat3 J;
  for (int j = 0; j < 3; ++j) {
    for (int i = 0; i < 3; ++i) {
      auto line = [&](double t) {
        Vec3 q = p;
        q[j] += t;
        return v(q)[i];
      };
      J(i, j) = fdetail::d1(line, c.step, c.order);
    }
  }
  return J;
}

inline double fd_divergence(const VectorField& v, const Vec3& p, const FdConfig& c = {}) {
  double div = 0.0;
  for (int d = 0; d < 3; ++d) {
    auto line = [&](double t) {
      Vec3 q = p;
      q[d] += t;
      return v(q)[d];
    };
    div += fdetail::d1(line, c.step, c.order);
  }
  return div;
}

inline Vec3 fd_curl(const VectorField& v, const Vec3& p, const FdConfig& c = {}) {
  const Mat3 J = fd_jacobian(v, p, c);
  return Vec3(J(2, 1) - J(1, 2), J(0, 2) - J(2, 0), J(1, 0) - J(0, 1));
}

// Convective derivative (v . grad) v.
inline Vec3 fd_convective(const VectorField& v, const Vec3& p, const FdConfig& c = {}) {
  return fd_jacobian(v, p, c) * v(p);
}

// Componentwise vector Laplacian.
inline Vec3 fd_vector_laplacian(const VectorField& v, const Vec3& p,
                                const FdConfig& c = {}) {
  Vec3 out;
  for (int i = 0; i < 3; ++i) {
    auto comp = [&v, i](const Vec3& q) { return v(q)[i]; };
    out[i] = fd_laplacian(comp, p, c);
  }
  return out;
}

}  // namespace qhydro
