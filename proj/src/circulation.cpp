#include "qhydro/circulation.hpp"

#include "qhydro/hydro.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>

namespace qhydro {

namespace {

// Largest distance of a curve sample from the origin, as a scale reference.
double curve_scale(const CurveSpec& curve) {
  double scale = 0.0;
  for (int k = 0; k <= curve.samples; ++k) {
    const double t =
        curve.t0 + (curve.t1 - curve.t0) * static_cast<double>(k) / curve.samples;
    scale = std::max(scale, curve.parametrization(t).norm());
  }
  return scale;
}

}  // namespace

CurveSpec circle_xy(double radius, double z, int samples) {
  if (!(radius > 0.0)) {
    throw std::invalid_argument("circle_xy: radius must be positive");
  }
  CurveSpec curve;
  curve.t0 = 0.0;
  curve.t1 = 2.0 * kPi;
  curve.closed = true;
  curve.samples = samples;
  curve.parametrization = [radius, z](double t) {
    return Vec3(radius * std::cos(t), radius * std::sin(t), z);
  };
  curve.derivative = [radius](double t) {
    return Vec3(-radius * std::sin(t), radius * std::cos(t), 0.0);
  };
  return curve;
}

CurveSpec reverse_curve(const CurveSpec& curve) {
  CurveSpec out = curve;
  const double t0 = curve.t0;
  const double t1 = curve.t1;
  auto gamma = curve.parametrization;
  auto dgamma = curve.derivative;
  out.parametrization = [gamma, t0, t1](double t) { return gamma(t0 + t1 - t); };
  out.derivative = [dgamma, t0, t1](double t) {
    return Vec3(-dgamma(t0 + t1 - t));
  };
  return out;
}

CurveSpec subcurve(const CurveSpec& curve, double a, double b) {
  if (!(a < b) || a < curve.t0 || b > curve.t1) {
    throw std::invalid_argument("subcurve: need t0 <= a < b <= t1");
  }
  CurveSpec out = curve;
  out.t0 = a;
  out.t1 = b;
  out.closed = false;
  out.samples = std::max(64, curve.samples);
  return out;
}

void validate_curve(const CurveSpec& curve) {
  if (!curve.parametrization || !curve.derivative) {
    throw std::invalid_argument("curve: parametrization and derivative required");
  }
  if (curve.samples < 64) {
    throw std::invalid_argument("curve: at least 64 samples required");
  }
  if (!(curve.t1 > curve.t0)) {
    throw std::invalid_argument("curve: need t1 > t0");
  }
  const double scale = curve_scale(curve);
  if (curve.closed) {
    const double gap =
        (curve.parametrization(curve.t0) - curve.parametrization(curve.t1)).norm();
    if (gap > 1e-12 * (1.0 + scale)) {
      throw std::invalid_argument("curve: marked closed but endpoints differ");
    }
  }
  // Spot-check the tangent closure against a central difference.
  const double span = curve.t1 - curve.t0;
  const double h = 1e-6 * span;
  for (int k = 0; k < 8; ++k) {
    const double t = curve.t0 + span * (0.5 + k) / 8.0;
    const Vec3 fd =
        (curve.parametrization(t + h) - curve.parametrization(t - h)) / (2.0 * h);
    const Vec3 an = curve.derivative(t);
    if ((fd - an).norm() > 1e-6 * (1.0 + an.norm())) {
      throw std::invalid_argument("curve: derivative disagrees with parametrization");
    }
  }
}

double line_integral(const VectorField& v, const CurveSpec& curve,
                     SingularSet singular, const CirculationConfig& cfg) {
  validate_curve(curve);
  if (singular != SingularSet::None) {
    for (int k = 0; k <= curve.samples; ++k) {
      const double t =
          curve.t0 + (curve.t1 - curve.t0) * static_cast<double>(k) / curve.samples;
      const Vec3 p = curve.parametrization(t);
      if (distance_to_singular(p, singular) < cfg.eps_sing) {
        raise("CurveHitsSingularSet",
              "curve sample within " + std::to_string(cfg.eps_sing) +
                  " of the singular set");
      }
    }
  }
  auto integrand = [&](double t) {
    return v(curve.parametrization(t)).dot(curve.derivative(t));
  };
  const auto result = integrate_1d(integrand, curve.t0, curve.t1, cfg.quad);
  if (!result.converged) {
    raise("NonConvergent", "line integral did not reach the requested tolerance");
  }
  return result.value;
}

double circulation(const VectorField& v, const CurveSpec& curve,
                   const PhysicalConstants& consts, SingularSet singular,
                   const CirculationConfig& cfg) {
  if (!curve.closed) {
    throw std::invalid_argument("circulation: curve must be closed");
  }
  const double raw = line_integral(v, curve, singular, cfg);
  return consts.mass * raw / (2.0 * kPi * consts.hbar);
}

int winding_number(const WaveFunction& psi, const CurveSpec& curve,
                   const WindingConfig& cfg) {
  validate_curve(curve);
  if (!curve.closed) {
    throw std::invalid_argument("winding_number: curve must be closed");
  }
  int n = std::max(curve.samples, 64);
  while (true) {
    std::vector<std::complex<double>> vals(static_cast<size_t>(n) + 1);
    double peak = 0.0;
    double trough = std::numeric_limits<double>::infinity();
    for (int k = 0; k <= n; ++k) {
      const double t =
          curve.t0 + (curve.t1 - curve.t0) * static_cast<double>(k) / n;
      vals[static_cast<size_t>(k)] = psi.evaluate(curve.parametrization(t));
      const double mag = std::abs(vals[static_cast<size_t>(k)]);
      peak = std::max(peak, mag);
      trough = std::min(trough, mag);
    }
    if (!(peak > 0.0) || trough <= cfg.node_tolerance_factor * peak) {
      raise("NodeOnCurve", "wave function vanishes on the curve");
    }
    double total = 0.0;
    bool resolved = true;
    for (int k = 0; k < n; ++k) {
      const double step = std::arg(vals[static_cast<size_t>(k) + 1] *
                                   std::conj(vals[static_cast<size_t>(k)]));
      if (std::fabs(step) > cfg.max_step_phase) {
        resolved = false;
        break;
      }
      total += step;
    }
    if (resolved) {
      const double turns = total / (2.0 * kPi);
      const double nearest = std::round(turns);
      if (std::fabs(turns - nearest) > 1e-6) {
        raise("NonConvergent",
              "accumulated phase is not an integer number of turns");
      }
      return static_cast<int>(nearest);
    }
    if (n >= cfg.max_samples) {
      raise("NonConvergent",
            "phase increment does not refine below the unwrap threshold");
    }
    n *= 2;
  }
}

std::vector<ScanRow> circulation_scan_phi_a(int n, double r0,
                                            const std::vector<double>& a_grid,
                                            const PhysicalConstants& consts) {
  if (!(r0 > 0.0)) {
    throw std::invalid_argument("circulation_scan_phi_a: r0 must be positive");
  }
  std::vector<ScanRow> rows;
  rows.reserve(a_grid.size());
  const CurveSpec curve = circle_xy(r0, 0.0);
  for (const double a : a_grid) {
    ScanRow row;
    row.a = a;
    if (a == 0.0) {
      row.status = ScanStatus::Undefined;
      row.note = "curve crosses the nodal plane";
      rows.push_back(row);
      continue;
    }
    try {
      const WaveFunction psi = phi_a_superposition(n, a, consts);
      // The superposition vanishes on a plane through the axis when the
      // mixing degenerates; detect nodes on the curve before integrating.
      double peak = 0.0;
      double trough = std::numeric_limits<double>::infinity();
      for (int k = 0; k <= curve.samples; ++k) {
        const double t = curve.t0 +
                         (curve.t1 - curve.t0) * static_cast<double>(k) / curve.samples;
        const double mag = std::abs(psi.evaluate(curve.parametrization(t)));
        peak = std::max(peak, mag);
        trough = std::min(trough, mag);
      }
      if (!(peak > 0.0) || trough <= 1e-9 * peak) {
        row.status = ScanStatus::Undefined;
        row.note = "node on curve";
        rows.push_back(row);
        continue;
      }
      const FlowFields flow = madelung_transform(psi, consts);
      row.value = circulation(flow.v, curve, consts, flow.singular);
      row.status = ScanStatus::Ok;
    } catch (const Error& err) {
      row.status = ScanStatus::Error;
      row.note = err.code();
    }
    rows.push_back(row);
  }
  return rows;
}

SweepReport quantization_sweep(const std::vector<StatePair>& states,
                               const std::vector<double>& radii,
                               const PhysicalConstants& consts) {
  SweepReport report;
  for (const StatePair& state : states) {
    const double mu = state.flow.mu;
    const bool quantized = std::fabs(mu - std::round(mu)) < 1e-12;
    for (const double radius : radii) {
      // Pick the circle height with the largest wave-function magnitude so
      // the curve stays clear of nodal surfaces (all families here have
      // axially symmetric |psi|, so one azimuth represents the whole circle).
      const double candidates[] = {0.0, 0.5 * radius, 1.0 * radius};
      double best_z = 0.0;
      double best_mag = -1.0;
      for (const double z : candidates) {
        const double mag =
            std::abs(state.psi.evaluate(Vec3(radius, 0.0, z)));
        if (mag > best_mag) {
          best_mag = mag;
          best_z = z;
        }
      }
      if (!(best_mag > 1e-8 * state.psi.peak_abs)) {
        raise("NodeOnCurve", "no admissible circle at radius " +
                                 std::to_string(radius) + " for " +
                                 state.flow.family_key);
      }
      SweepEntry entry;
      entry.family_key = state.flow.family_key;
      entry.radius = radius;
      entry.z_offset = best_z;
      entry.quantized = quantized;
      entry.value = circulation(state.flow.v, circle_xy(radius, best_z), consts,
                                state.flow.singular);
      entry.deviation_from_integer =
          std::fabs(entry.value - std::round(entry.value));
      if (quantized) {
        report.max_deviation =
            std::max(report.max_deviation, entry.deviation_from_integer);
      }
      report.entries.push_back(entry);
    }
  }
  return report;
}

}  // namespace qhydro
