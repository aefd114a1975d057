// Adaptive Gauss-Kronrod quadrature.
//
// The workhorse is a globally adaptive 7-15 Gauss-Kronrod rule: the worst
// panel (largest error estimate) is bisected until the summed error estimate
// meets the tolerance or the subdivision budget runs out.  Integrands may
// return double or std::complex<double>.  Helpers map half-line and full-line
// integrals onto (0,1) resp. (-1,1), and iterated versions integrate over 1-,
// 2-, and 3-dimensional boxes with ball/cylinder regions removed (the removed
// chords are subtracted from the innermost integration lines, so excluded
// neighbourhoods of singular sets never get sampled).
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <type_traits>
#include <vector>

#include "qhydro/errors.hpp"
#include "qhydro/numerics/grid.hpp"

namespace qhydro {

struct QuadratureConfig {
  double abs_tol = 1e-10;
  double rel_tol = 1e-8;
  int max_subdivisions = 2000;  // number of panel bisections allowed
  const char* scheme = "gk15";
};

template <class T>
struct IntegralResult {
  T value{};
  double error = 0.0;       // summed panel error estimate
  long evaluations = 0;     // integrand evaluations
  bool converged = true;    // false when the subdivision budget ran out
};

namespace qdetail {

// 15-point Kronrod extension of the 7-point Gauss rule on [-1,1].
// Nodes are the positive half (descending); index 7 is the origin.
// Odd indices are the embedded Gauss nodes.
inline constexpr double kGKNodes[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
inline constexpr double kGKWeights[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double kGWeights[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

inline double vnorm(double x) { return std::fabs(x); }
inline double vnorm(const std::complex<double>& z) { return std::abs(z); }

inline bool vfinite(double x) { return std::isfinite(x); }
inline bool vfinite(const std::complex<double>& z) {
  return std::isfinite(z.real()) && std::isfinite(z.imag());
}

// One Gauss-Kronrod panel.  Returns the Kronrod value; the error estimate
// follows the classical rescaling err = resasc * min(1,(200 e0/resasc)^1.5)
// with a roundoff floor proportional to the L1 norm of the samples.
template <class T, class F>
void gk15_panel(F& f, double a, double b, T& value, double& err, long& evals) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);

  T fc = f(c);
  if (!vfinite(fc)) raise("NonFinite", "integrand not finite at x=" + std::to_string(c));
  T flo[7], fhi[7];
  T resk = kGKWeights[7] * fc;
  T resg = kGWeights[3] * fc;
  double resabs = kGKWeights[7] * vnorm(fc);
  for (int j = 0; j < 7; ++j) {
    const double dx = h * kGKNodes[j];
    flo[j] = f(c - dx);
    fhi[j] = f(c + dx);
    if (!vfinite(flo[j]) || !vfinite(fhi[j]))
      raise("NonFinite", "integrand not finite near x=" + std::to_string(c));
    resk += kGKWeights[j] * (flo[j] + fhi[j]);
    resabs += kGKWeights[j] * (vnorm(flo[j]) + vnorm(fhi[j]));
    if (j % 2 == 1) resg += kGWeights[(j - 1) / 2] * (flo[j] + fhi[j]);
  }
  evals += 15;

  const T mean = resk * 0.5;
  double resasc = kGKWeights[7] * vnorm(fc - mean);
  for (int j = 0; j < 7; ++j)
    resasc += kGKWeights[j] * (vnorm(flo[j] - mean) + vnorm(fhi[j] - mean));

  value = resk * h;
  resabs *= std::fabs(h);
  resasc *= std::fabs(h);
  double e0 = vnorm(resk - resg) * std::fabs(h);
  if (resasc != 0.0 && e0 != 0.0)
    e0 = resasc * std::min(1.0, std::pow(200.0 * e0 / resasc, 1.5));
  const double floor50 = 50.0 * std::numeric_limits<double>::epsilon() * resabs;
  err = std::max(e0, floor50);
}

}  // namespace qdetail

// Globally adaptive integral of f over [a,b].
template <class F>
auto integrate_1d(F&& f, double a, double b, const QuadratureConfig& cfg = {})
    -> IntegralResult<std::decay_t<decltype(f(0.5 * (a + b)))>> {
  using T = std::decay_t<decltype(f(0.5 * (a + b)))>;
  struct Seg {
    double a, b;
    T val;
    double err;
    bool frozen;  // too narrow to bisect further
  };

  IntegralResult<T> out;
  if (a == b) return out;

  std::vector<Seg> segs;
  {
    Seg s{a, b, T{}, 0.0, false};
    qdetail::gk15_panel(f, a, b, s.val, s.err, out.evaluations);
    segs.push_back(s);
  }

  int splits = 0;
  for (;;) {
    T total{};
    double toterr = 0.0;
    for (const auto& s : segs) {
      total += s.val;
      toterr += s.err;
    }
    out.value = total;
    out.error = toterr;

    const double tol = std::max(cfg.abs_tol, cfg.rel_tol * qdetail::vnorm(total));
    if (toterr <= tol) {
      out.converged = true;
      return out;
    }
    if (splits >= cfg.max_subdivisions) {
      out.converged = false;
      return out;
    }

    // Worst refinable panel; ties resolved toward the leftmost panel so the
    // subdivision order (and thus the result) is deterministic.
    int worst = -1;
    for (int i = 0; i < static_cast<int>(segs.size()); ++i) {
      if (segs[i].frozen) continue;
      if (worst < 0 || segs[i].err > segs[worst].err) worst = i;
    }
    if (worst < 0) {
      out.converged = false;
      return out;
    }
    Seg s = segs[worst];
    const double width = s.b - s.a;
    const double scale = std::max({std::fabs(s.a), std::fabs(s.b), 1.0});
    if (width <= 1024.0 * std::numeric_limits<double>::epsilon() * scale) {
      segs[worst].frozen = true;
      continue;
    }
    const double m = 0.5 * (s.a + s.b);
    Seg left{s.a, m, T{}, 0.0, false}, right{m, s.b, T{}, 0.0, false};
    qdetail::gk15_panel(f, left.a, left.b, left.val, left.err, out.evaluations);
    qdetail::gk15_panel(f, right.a, right.b, right.val, right.err, out.evaluations);
    segs[worst] = left;
    segs.push_back(right);
    ++splits;
  }
}

// Integral over [0, inf) via x = t/(1-t).  The Kronrod nodes are interior, so
// the transformed integrand is never evaluated at t = 1.
template <class F>
auto integrate_half_line(F&& f, const QuadratureConfig& cfg = {}) {
  auto g = [&f](double t) {
    const double om = 1.0 - t;
    const double x = t / om;
    return f(x) * (1.0 / (om * om));
  };
  return integrate_1d(g, 0.0, 1.0, cfg);
}

// Integral over (-inf, inf) via x = t/(1-t^2).
template <class F>
auto integrate_real_line(F&& f, const QuadratureConfig& cfg = {}) {
  auto g = [&f](double t) {
    const double om = 1.0 - t * t;
    const double x = t / om;
    const double jac = (1.0 + t * t) / (om * om);
    return f(x) * jac;
  };
  return integrate_1d(g, -1.0, 1.0, cfg);
}

namespace qdetail {

using Interval = std::pair<double, double>;

// Remove [c-r, c+r] from every interval in segs.
inline void subtract_chord(std::vector<Interval>& segs, double c, double r) {
  if (!(r > 0.0)) return;
  std::vector<Interval> out;
  out.reserve(segs.size() + 1);
  for (const auto& [lo, hi] : segs) {
    const double a = c - r, b = c + r;
    if (b <= lo || a >= hi) {
      out.emplace_back(lo, hi);
      continue;
    }
    if (a > lo) out.emplace_back(lo, a);
    if (b < hi) out.emplace_back(b, hi);
  }
  segs = std::move(out);
}

// Insert breakpoints so the adaptive rule never straddles a region edge.
inline void add_breakpoint(std::vector<double>& cuts, double lo, double hi, double x) {
  if (x > lo && x < hi) cuts.push_back(x);
}

}  // namespace qdetail

// Iterated adaptive integral of f(point) over the box described by `spec`
// (dimension 1, 2, or 3) with the spec's excluded regions removed.
// The innermost axis is z (3-D) or y (2-D); chords of excluded regions are
// subtracted from the innermost lines, so excluded sets are hard holes.
template <class F>
IntegralResult<double> integrate_region(F&& f, const GridSpec& spec,
                                        const QuadratureConfig& cfg = {}) {
  spec.validate();
  long evals = 0;
  const auto& ex = spec.excluded;

  auto segments_1d = [&ex, &spec](int axis, const Vec3& fixed, double lo, double hi) {
    // Valid sub-intervals of the line {p : p[axis] in [lo,hi]} through `fixed`.
    std::vector<qdetail::Interval> segs{{lo, hi}};
    for (const auto& r : ex) {
      if (r.kind == ExcludedRegion::Kind::Ball) {
        double d2 = 0.0;
        for (int d = 0; d < 3; ++d)
          if (d != axis) {
            const double dd = fixed[d] - r.center[d];
            d2 += dd * dd;
          }
        const double rem = r.radius * r.radius - d2;
        if (rem > 0.0) qdetail::subtract_chord(segs, r.center[axis], std::sqrt(rem));
      } else {  // CylinderZ: excludes by (x,y) only
        if (axis == 2) {
          const double dx = fixed.x() - r.center.x(), dy = fixed.y() - r.center.y();
          if (std::hypot(dx, dy) < r.radius) segs.clear();
        } else if (axis == 1) {
          const double dx = fixed.x() - r.center.x();
          const double rem = r.radius * r.radius - dx * dx;
          if (rem > 0.0) qdetail::subtract_chord(segs, r.center.y(), std::sqrt(rem));
        } else {  // axis == 0: cylinder cuts the x line only in <=2-D usage
          if (spec.dimension == 1) {
            const double dy = fixed.y() - r.center.y();
            const double rem = r.radius * r.radius - dy * dy;
            if (rem > 0.0) qdetail::subtract_chord(segs, r.center.x(), std::sqrt(rem));
          }
        }
      }
    }
    return segs;
  };

  // In 2-D a z-cylinder is a disk, so treat it like a ball in the (x,y) plane.
  auto inner_line = [&](const Vec3& fixed, int axis, double lo, double hi,
                        auto&& integrand, const QuadratureConfig& c) -> double {
    double total = 0.0;
    for (const auto& [slo, shi] : segments_1d(axis, fixed, lo, hi)) {
      auto res = integrate_1d(integrand, slo, shi, c);
      total += res.value;
      evals += res.evaluations;
    }
    return total;
  };

  IntegralResult<double> out;

  if (spec.dimension == 1) {
    Vec3 fixed = Vec3::Zero();
    auto g = [&](double x) { return f(Vec3(x, 0.0, 0.0)); };
    double total = 0.0;
    std::vector<qdetail::Interval> segs{{spec.extents[0].lo, spec.extents[0].hi}};
    for (const auto& r : ex)
      if (r.kind == ExcludedRegion::Kind::Ball || r.kind == ExcludedRegion::Kind::CylinderZ)
        qdetail::subtract_chord(segs, r.center.x(), r.radius);
    (void)fixed;
    double errsum = 0.0;
    for (const auto& [a, b] : segs) {
      auto res = integrate_1d(g, a, b, cfg);
      total += res.value;
      errsum += res.error;
      evals += res.evaluations;
      out.converged = out.converged && res.converged;
    }
    out.value = total;
    out.error = errsum;
    out.evaluations = evals;
    return out;
  }

  if (spec.dimension == 2) {
    const double xlo = spec.extents[0].lo, xhi = spec.extents[0].hi;
    const double ylo = spec.extents[1].lo, yhi = spec.extents[1].hi;
    QuadratureConfig inner = cfg;
    inner.abs_tol = cfg.abs_tol / (4.0 * std::max(1.0, xhi - xlo));
    inner.rel_tol = cfg.rel_tol * 0.25;

    std::vector<double> xcuts{xlo, xhi};
    for (const auto& r : ex) {
      qdetail::add_breakpoint(xcuts, xlo, xhi, r.center.x() - r.radius);
      qdetail::add_breakpoint(xcuts, xlo, xhi, r.center.x() + r.radius);
    }
    std::sort(xcuts.begin(), xcuts.end());

    auto outer = [&](double x) {
      Vec3 fixed(x, 0.0, 0.0);
      auto g = [&](double y) { return f(Vec3(x, y, 0.0)); };
      // In 2-D both region kinds remove a y-chord.
      std::vector<qdetail::Interval> segs{{ylo, yhi}};
      for (const auto& r : ex) {
        const double dx = x - r.center.x();
        const double rem = r.radius * r.radius - dx * dx;
        if (rem > 0.0) qdetail::subtract_chord(segs, r.center.y(), std::sqrt(rem));
      }
      double total = 0.0;
      for (const auto& [a, b] : segs) {
        auto res = integrate_1d(g, a, b, inner);
        total += res.value;
        evals += res.evaluations;
      }
      (void)fixed;
      return total;
    };

    double total = 0.0, errsum = 0.0;
    for (std::size_t i = 0; i + 1 < xcuts.size(); ++i) {
      auto res = integrate_1d(outer, xcuts[i], xcuts[i + 1], cfg);
      total += res.value;
      errsum += res.error;
      out.converged = out.converged && res.converged;
    }
    out.value = total;
    out.error = errsum;
    out.evaluations = evals;
    return out;
  }

  // dimension == 3
  const double xlo = spec.extents[0].lo, xhi = spec.extents[0].hi;
  const double ylo = spec.extents[1].lo, yhi = spec.extents[1].hi;
  const double zlo = spec.extents[2].lo, zhi = spec.extents[2].hi;
  QuadratureConfig mid = cfg;
  mid.abs_tol = cfg.abs_tol / (4.0 * std::max(1.0, xhi - xlo));
  mid.rel_tol = cfg.rel_tol * 0.25;
  QuadratureConfig innercfg = cfg;
  innercfg.abs_tol = mid.abs_tol / (4.0 * std::max(1.0, yhi - ylo));
  innercfg.rel_tol = cfg.rel_tol * 0.25;

  std::vector<double> xcuts{xlo, xhi};
  for (const auto& r : ex) {
    qdetail::add_breakpoint(xcuts, xlo, xhi, r.center.x() - r.radius);
    qdetail::add_breakpoint(xcuts, xlo, xhi, r.center.x() + r.radius);
  }
  std::sort(xcuts.begin(), xcuts.end());

  auto outer = [&](double x) {
    auto midline = [&](double y) {
      Vec3 fixed(x, y, 0.0);
      auto g = [&](double z) { return f(Vec3(x, y, z)); };
      return inner_line(fixed, 2, zlo, zhi, g, innercfg);
    };
    // y-line: cylinders remove chords (they exclude every z); balls add cuts.
    std::vector<qdetail::Interval> ysegs{{ylo, yhi}};
    std::vector<double> ycuts;
    for (const auto& r : ex) {
      const double dx = x - r.center.x();
      const double rem = r.radius * r.radius - dx * dx;
      if (rem <= 0.0) continue;
      const double w = std::sqrt(rem);
      if (r.kind == ExcludedRegion::Kind::CylinderZ)
        qdetail::subtract_chord(ysegs, r.center.y(), w);
      else {
        ycuts.push_back(r.center.y() - w);
        ycuts.push_back(r.center.y() + w);
      }
    }
    double total = 0.0;
    for (const auto& [a, b] : ysegs) {
      std::vector<double> cuts{a, b};
      for (double c : ycuts) qdetail::add_breakpoint(cuts, a, b, c);
      std::sort(cuts.begin(), cuts.end());
      for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        auto res = integrate_1d(midline, cuts[i], cuts[i + 1], mid);
        total += res.value;
        evals += res.evaluations;
      }
    }
    return total;
  };

  double total = 0.0, errsum = 0.0;
  for (std::size_t i = 0; i + 1 < xcuts.size(); ++i) {
    auto res = integrate_1d(outer, xcuts[i], xcuts[i + 1], cfg);
    total += res.value;
    errsum += res.error;
    out.converged = out.converged && res.converged;
  }
  out.value = total;
  out.error = errsum;
  out.evaluations = evals;
  return out;
}

// Convenience: integrate over a plain box (no exclusions).
template <class F>
IntegralResult<double> integrate_box(F&& f, int dim, const Vec3& lo, const Vec3& hi,
                                     const QuadratureConfig& cfg = {}) {
  GridSpec g;
  g.dimension = dim;
  for (int d = 0; d < dim; ++d) g.extents[d] = {lo[d], hi[d]};
  g.points_per_axis = 8;
  return integrate_region(std::forward<F>(f), g, cfg);
}

}  // namespace qhydro
