// Sampling geometry: axis-aligned evaluation boxes, excluded regions around
// singular sets, and uniform lattices used by the pointwise residual checks.
//
// Points are always Eigen::Vector3d; one- and two-dimensional problems simply
// ignore the trailing components (kept at zero).  An ExcludedRegion is either
// a ball (isolated singular point or density cusp) or an infinite cylinder
// around the z axis (line vortex).
#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace qhydro {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

// Location of the set where a velocity field or density is singular.
enum class SingularSet { None, Origin2D, AxisZ };

// Cylindrical distance from a point to a singular set (+inf for None).
inline double distance_to_singular(const Vec3& p, SingularSet s) {
  switch (s) {
    case SingularSet::Origin2D:
    case SingularSet::AxisZ:
      return std::hypot(p.x(), p.y());
    case SingularSet::None:
    default:
      return std::numeric_limits<double>::infinity();
  }
}

struct ExcludedRegion {
  enum class Kind { Ball, CylinderZ };
  Kind kind = Kind::Ball;
  Vec3 center = Vec3::Zero();  // CylinderZ uses only x,y of the center
  double radius = 0.0;

  bool contains(const Vec3& p) const {
    if (kind == Kind::Ball) return (p - center).norm() < radius;
    const double dx = p.x() - center.x(), dy = p.y() - center.y();
    return std::hypot(dx, dy) < radius;
  }
};

inline ExcludedRegion ball_region(const Vec3& center, double radius) {
  return ExcludedRegion{ExcludedRegion::Kind::Ball, center, radius};
}

inline ExcludedRegion cylinder_region(double radius, double cx = 0.0, double cy = 0.0) {
  return ExcludedRegion{ExcludedRegion::Kind::CylinderZ, Vec3(cx, cy, 0.0), radius};
}

struct AxisInterval {
  double lo = 0.0;
  double hi = 0.0;
  double extent() const { return hi - lo; }
};

// Rectangular evaluation region with an optional set of excluded regions.
// points_per_axis controls the uniform lattice delivered by lattice_points();
// the adaptive quadrature routines use only the geometry.
struct GridSpec {
  int dimension = 3;  // 1, 2, or 3
  std::array<AxisInterval, 3> extents{};
  int points_per_axis = 16;
  std::vector<ExcludedRegion> excluded;

  void validate() const {
    if (dimension < 1 || dimension > 3)
      throw std::invalid_argument("GridSpec: dimension must be 1, 2, or 3");
    if (points_per_axis < 8)
      throw std::invalid_argument("GridSpec: need at least 8 points per axis");
    for (int d = 0; d < dimension; ++d)
      if (!(extents[d].lo < extents[d].hi))
        throw std::invalid_argument("GridSpec: empty axis interval");
    for (const auto& r : excluded)
      if (!(r.radius > 0.0))
        throw std::invalid_argument("GridSpec: excluded region needs positive radius");
  }

  bool is_excluded(const Vec3& p) const {
    for (const auto& r : excluded)
      if (r.contains(p)) return true;
    return false;
  }

  // Uniform lattice over the box with excluded points removed.
  std::vector<Vec3> lattice_points() const {
    validate();
    const int n = points_per_axis;
    std::array<int, 3> counts = {1, 1, 1};
    for (int d = 0; d < dimension; ++d) counts[d] = n;
    std::vector<Vec3> pts;
    pts.reserve(static_cast<std::size_t>(counts[0]) * counts[1] * counts[2]);
    for (int i = 0; i < counts[0]; ++i)
      for (int j = 0; j < counts[1]; ++j)
        for (int k = 0; k < counts[2]; ++k) {
          Vec3 p = Vec3::Zero();
          const std::array<int, 3> idx = {i, j, k};
          for (int d = 0; d < dimension; ++d) {
            const double t = (counts[d] == 1) ? 0.5 : static_cast<double>(idx[d]) / (counts[d] - 1);
            p[d] = extents[d].lo + t * extents[d].extent();
          }
          if (!is_excluded(p)) pts.push_back(p);
        }
    return pts;
  }
};

inline GridSpec make_grid_2d(double lo, double hi, int points_per_axis,
                             std::vector<ExcludedRegion> excluded = {}) {
  GridSpec g;
  g.dimension = 2;
  g.extents[0] = {lo, hi};
  g.extents[1] = {lo, hi};
  g.points_per_axis = points_per_axis;
  g.excluded = std::move(excluded);
  return g;
}

inline GridSpec make_grid_3d(double lo, double hi, int points_per_axis,
                             std::vector<ExcludedRegion> excluded = {}) {
  GridSpec g;
  g.dimension = 3;
  g.extents[0] = {lo, hi};
  g.extents[1] = {lo, hi};
  g.extents[2] = {lo, hi};
  g.points_per_axis = points_per_axis;
  g.excluded = std::move(excluded);
  return g;
}

}  // namespace qhydro
