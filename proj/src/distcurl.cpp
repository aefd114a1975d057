#include "qhydro/distcurl.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qhydro {

namespace {

GridSpec region_from_support(const Box3& support, int dim) {
  GridSpec g;
  g.dimension = dim;
  g.points_per_axis = 8;
  for (int d = 0; d < dim; ++d) {
    if (!(support.lo[d] < support.hi[d])) {
      throw std::invalid_argument("pairing: test function support box is empty");
    }
    g.extents[d] = {support.lo[d], support.hi[d]};
  }
  return g;
}

struct ScanData {
  std::vector<std::pair<double, double>> rows;  // (excluded radius, value)
  double value = 0.0;
  double error = 0.0;
};

// Runs `pairing` with the singular set excluded at each ladder radius and
// accepts the smallest-radius value once the increments decay geometrically.
// The returned error adds the last increment as a tail bound, so the scan
// spread of an accepted result stays below 10x the reported error.
template <class Pairing>
ScanData scan_pairing(Pairing&& pairing, const GridSpec& base, const PairingConfig& cfg,
                      const std::string& what) {
  ScanData out;
  if (cfg.singular == SingularSet::None) {
    const IntegralResult<double> r = pairing(base);
    if (!r.converged) raise("NonConvergent", what + ": quadrature budget exhausted");
    out.rows.emplace_back(0.0, r.value);
    out.value = r.value;
    out.error = r.error;
    return out;
  }

  std::vector<double> ladder = cfg.eps_ladder;
  if (ladder.empty()) throw std::invalid_argument(what + ": empty excluded-radius ladder");
  std::sort(ladder.begin(), ladder.end(), std::greater<double>());

  std::vector<double> vals;
  std::vector<double> errs;
  for (const double eps : ladder) {
    if (!(eps > 0.0)) throw std::invalid_argument(what + ": excluded radius must be positive");
    GridSpec g = base;
    g.excluded.push_back(cylinder_region(eps));
    const IntegralResult<double> r = pairing(g);
    if (!r.converged) raise("NonConvergent", what + ": quadrature budget exhausted");
    vals.push_back(r.value);
    errs.push_back(r.error);
    out.rows.emplace_back(eps, r.value);
  }

  const size_t K = vals.size();
  double tail = 0.0;
  if (K >= 2) {
    tail = std::fabs(vals[K - 1] - vals[K - 2]);
    if (K >= 3) {
      const double prev = std::fabs(vals[K - 2] - vals[K - 3]);
      const double slack =
          10.0 * (errs[K - 1] + errs[K - 2] + 1e-14 * (1.0 + std::fabs(vals[K - 1])));
      if (tail > cfg.increment_decay * prev + slack) {
        raise("EpsilonScanDiverged",
              what + ": pairing keeps changing as the excluded radius shrinks");
      }
    }
  }
  out.value = vals[K - 1];
  out.error = errs[K - 1] + tail;
  return out;
}

std::string singular_support_tag(SingularSet s) {
  switch (s) {
    case SingularSet::Origin2D:
      return "point";
    case SingularSet::AxisZ:
      return "line";
    default:
      return "none";
  }
}

// Largest per-component magnitude of a pairing result.
double pairing_magnitude(const PairingResult& r) {
  if (r.is_vector) return r.vector_value.cwiseAbs().maxCoeff();
  return std::fabs(r.value);
}

}  // namespace

PairingResult dist_curl_2d(const VectorField& v, const TestFunction& phi,
                           const PairingConfig& cfg) {
  if (!phi.value || !phi.gradient) {
    throw std::invalid_argument("dist_curl_2d: test function needs value and gradient");
  }
  if (phi.dimension != 2) {
    throw std::invalid_argument("dist_curl_2d: test function must be two-dimensional");
  }
  auto integrand = [&v, &phi](const Vec3& p) {
    const Vec3 g = phi.gradient(p);
    const Vec3 w = v(p);
    return -(w.y() * g.x() - w.x() * g.y());
  };
  const GridSpec base = region_from_support(phi.support, 2);
  const ScanData s = scan_pairing(
      [&](const GridSpec& g) { return integrate_region(integrand, g, cfg.quad); }, base,
      cfg, "dist_curl_2d");

  PairingResult out;
  out.is_vector = false;
  out.value = s.value;
  out.quadrature_error = s.error;
  out.test_tag = phi.family_tag;
  for (const auto& [eps, val] : s.rows) {
    out.epsilon_scan.push_back({eps, val, Vec3::Zero()});
  }
  return out;
}

PairingResult dist_curl_3d(const VectorField& v,
                           const std::array<TestFunction, 3>& components,
                           const PairingConfig& cfg) {
  PairingResult out;
  out.is_vector = true;
  bool tagged = false;
  for (int i = 0; i < 3; ++i) {
    const TestFunction& phi = components[static_cast<size_t>(i)];
    if (!phi.value || !phi.gradient) {
      throw std::invalid_argument("dist_curl_3d: every component needs value and gradient");
    }
    if (!tagged && phi.family_tag != "zero") {
      out.test_tag = phi.family_tag;
      tagged = true;
    }
    if (phi.family_tag == "zero") continue;

    auto integrand = [&v, &phi, i](const Vec3& p) {
      const Vec3 g = phi.gradient(p);
      return v(p).cross(g)[i];
    };
    const GridSpec base = region_from_support(phi.support, 3);
    const ScanData s = scan_pairing(
        [&](const GridSpec& g) { return integrate_region(integrand, g, cfg.quad); }, base,
        cfg, "dist_curl_3d");
    out.vector_value[i] = s.value;
    out.quadrature_error += s.error;
    if (out.epsilon_scan.size() < s.rows.size()) out.epsilon_scan.resize(s.rows.size());
    for (size_t r = 0; r < s.rows.size(); ++r) {
      out.epsilon_scan[r].eps_sing = s.rows[r].first;
      out.epsilon_scan[r].vector_value[i] = s.rows[r].second;
    }
  }
  return out;
}

DeltaCoefficient delta_coefficient_extract(
    const VectorField& v, const std::function<TestFunction(double)>& mollifier_family,
    const std::vector<double>& widths, const PairingConfig& cfg) {
  if (!mollifier_family) {
    throw std::invalid_argument("delta_coefficient_extract: mollifier family required");
  }
  if (widths.size() < 3) {
    throw std::invalid_argument("delta_coefficient_extract: need at least three widths");
  }
  std::vector<double> sorted = widths;
  std::sort(sorted.begin(), sorted.end(), std::greater<double>());

  DeltaCoefficient out;
  std::vector<double> vals;
  double errsum = 0.0;
  for (const double w : sorted) {
    double pairing = 0.0;
    try {
      const PairingResult r = dist_curl_2d(v, mollifier_family(w), cfg);
      pairing = r.value;
      errsum += r.quadrature_error;
    } catch (const Error& err) {
      if (std::string(err.code()) == "EpsilonScanDiverged") {
        raise("NoConvergence",
              "delta coefficient: pairing at width " + std::to_string(w) +
                  " failed its local-integrability scan");
      }
      throw;
    }
    vals.push_back(pairing);
    out.table.emplace_back(w, pairing);
  }

  const size_t K = vals.size();
  const double d_last = std::fabs(vals[K - 1] - vals[K - 2]);
  const double d_first = std::fabs(vals[1] - vals[0]);
  const double slack = 10.0 * (errsum + 1e-14 * (1.0 + std::fabs(vals[K - 1])));
  if (d_last > 0.6 * d_first + slack) {
    raise("NoConvergence",
          "delta coefficient: mollifier pairings do not converge as the width shrinks");
  }
  out.coefficient = vals[K - 1];
  out.extrapolation_error = d_last + errsum;
  return out;
}

IrrotationalityReport quasi_irrotationality_report(
    const VectorField& v, int dimension, SingularSet singular,
    const std::vector<TestFunction>& off_support,
    const std::vector<TestFunction>& on_support, double tol, const PairingConfig& cfg) {
  if (dimension != 2 && dimension != 3) {
    throw std::invalid_argument("quasi_irrotationality_report: dimension must be 2 or 3");
  }
  if (off_support.empty() || on_support.empty()) {
    throw std::invalid_argument(
        "quasi_irrotationality_report: need both off-support and on-support probes");
  }

  PairingConfig local = cfg;
  local.singular = singular;
  auto pair_one = [&](const TestFunction& phi) {
    if (dimension == 2) return pairing_magnitude(dist_curl_2d(v, phi, local));
    return pairing_magnitude(dist_curl_3d(v, {phi, phi, phi}, local));
  };

  IrrotationalityReport report;
  report.support_tag = singular_support_tag(singular);
  report.tolerance = tol;
  for (const TestFunction& phi : off_support) {
    report.max_off_support = std::max(report.max_off_support, pair_one(phi));
  }
  for (const TestFunction& phi : on_support) {
    report.max_on_support = std::max(report.max_on_support, pair_one(phi));
  }

  if (report.max_off_support < tol && report.max_on_support < tol) {
    report.verdict = IrrotationalityVerdict::Irrotational;
    return report;
  }
  if (report.max_off_support < tol && report.max_on_support > 100.0 * tol) {
    report.verdict = IrrotationalityVerdict::QuasiIrrotational;
    return report;
  }
  raise("Inconclusive",
        "curl pairings fit neither the irrotational nor the quasi-irrotational pattern");
}

PairingResult curl_expectation(const FlowFields& flow, const PairingConfig& cfg) {
  if (!flow.rho || !flow.v) {
    throw std::invalid_argument("curl_expectation: flow needs rho and v");
  }

  // Ray-scan decay probe: the density must be finite everywhere sampled and
  // fall below a deep relative cutoff at some bracketing radius.
  const double peak = std::max(flow.rho_peak, 1e-300);
  const double cutoff = 1e-13 * peak;
  std::vector<Vec3> dirs;
  for (int d = 0; d < flow.dimension; ++d) {
    Vec3 e = Vec3::Zero();
    e[d] = 1.0;
    dirs.push_back(e);
    dirs.push_back(-e);
  }
  if (flow.dimension == 2) {
    for (const double sx : {1.0, -1.0})
      for (const double sy : {1.0, -1.0})
        dirs.push_back(Vec3(sx, sy, 0.0).normalized());
  } else {
    for (const double sx : {1.0, -1.0})
      for (const double sy : {1.0, -1.0})
        for (const double sz : {1.0, -1.0})
          dirs.push_back(Vec3(sx, sy, sz).normalized());
  }
  double box_radius = 0.0;
  for (const double radius : {5.0, 10.0, 20.0, 40.0, 80.0, 160.0}) {
    double worst = 0.0;
    for (const Vec3& dir : dirs) {
      const double val = flow.rho(radius * dir);
      if (!std::isfinite(val) || val < -1e-12 * peak) {
        raise("ExtensionHypothesisViolated",
              "density is not finite and nonnegative along the ray scan");
      }
      worst = std::max(worst, val);
    }
    if (worst < cutoff) {
      box_radius = radius;
      break;
    }
  }
  if (box_radius == 0.0) {
    raise("ExtensionHypothesisViolated",
          "density fails to decay along the ray scan (no admissible box)");
  }

  std::function<Vec3(const Vec3&)> grad_rho = flow.grad_rho;
  if (!grad_rho) {
    const ScalarField rho = flow.rho;
    grad_rho = [rho](const Vec3& p) { return fd_gradient(rho, p, FdConfig{1e-4, 4}); };
  }

  GridSpec base;
  base.dimension = flow.dimension;
  base.points_per_axis = 8;
  for (int d = 0; d < flow.dimension; ++d) base.extents[d] = {-box_radius, box_radius};

  PairingConfig local = cfg;
  local.singular = flow.singular;

  PairingResult out;
  out.test_tag = flow.family_key;
  if (flow.dimension == 2) {
    auto integrand = [&](const Vec3& p) {
      return flow.v(p).cross(grad_rho(p)).z();
    };
    const ScanData s = scan_pairing(
        [&](const GridSpec& g) { return integrate_region(integrand, g, local.quad); },
        base, local, "curl_expectation");
    out.is_vector = false;
    out.value = s.value;
    out.quadrature_error = s.error;
    for (const auto& [eps, val] : s.rows) out.epsilon_scan.push_back({eps, val, Vec3::Zero()});
    return out;
  }

  out.is_vector = true;
  for (int i = 0; i < 3; ++i) {
    auto integrand = [&, i](const Vec3& p) { return flow.v(p).cross(grad_rho(p))[i]; };
    const ScanData s = scan_pairing(
        [&](const GridSpec& g) { return integrate_region(integrand, g, local.quad); },
        base, local, "curl_expectation");
    out.vector_value[i] = s.value;
    out.quadrature_error += s.error;
    if (out.epsilon_scan.size() < s.rows.size()) out.epsilon_scan.resize(s.rows.size());
    for (size_t r = 0; r < s.rows.size(); ++r) {
      out.epsilon_scan[r].eps_sing = s.rows[r].first;
      out.epsilon_scan[r].vector_value[i] = s.rows[r].second;
    }
  }
  return out;
}

DefectResult weak_derivative_defect(CutVariant variant, RadialCase c, int n,
                                    double a_param, double mu,
                                    const PhysicalConstants& consts,
                                    const QuadratureConfig& quad) {
  const auto radial = radial_profile(c, n, a_param, mu, consts);

  // Fixed reference test function xi(x, y) = bump(x - 2) * bump(y); on the
  // cut y = 0 the second factor is 1 and the support is x in [1, 3].
  auto integrand = [&radial](double x) {
    const double r = radial(x).f;
    return r * Bump1D::value(x - 2.0);
  };
  const IntegralResult<double> li = integrate_1d(integrand, 1.0, 3.0, quad);
  if (!li.converged || !std::isfinite(li.value)) {
    raise("LineIntegralDiverged", "boundary line integral did not converge");
  }

  DefectResult out;
  out.line_integral = li.value;
  out.quadrature_error = li.error;
  const double angle = 2.0 * kPi * mu;
  switch (variant) {
    case CutVariant::Exp:
      out.factor = std::complex<double>(std::cos(angle) - 1.0, std::sin(angle));
      out.variant_tag = "exp";
      break;
    case CutVariant::Cos:
      out.factor = std::complex<double>(std::cos(angle) - 1.0, 0.0);
      out.variant_tag = "cos";
      break;
    case CutVariant::Sin:
      out.factor = std::complex<double>(std::sin(angle), 0.0);
      out.variant_tag = "sin";
      break;
  }
  out.defect = out.factor * out.line_integral;
  return out;
}

}  // namespace qhydro
