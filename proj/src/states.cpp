// Construction of the closed-form state families and their field bundles.
//
// All radial data flows through order-3 jets, so every derivative used by
// the residual evaluators is analytic (no stencils).  Normalization
// constants are computed by quadrature at construction and cached in the
// returned closures.
#include "qhydro/states.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "qhydro/errors.hpp"
#include "qhydro/numerics/quadrature.hpp"
#include "qhydro/specfun.hpp"

namespace qhydro {

namespace {

constexpr double kTinyRadius = 1e-12;

double in_plane_radius(const Vec3& p) { return std::hypot(p.x(), p.y()); }

// Azimuthal angle with branch arg in [0, 2*pi) (cut along the positive
// x-axis).  For integer angular parameter the phase factor is branch
// independent, so this convention is used uniformly.
double azimuth(const Vec3& p) {
  double a = std::atan2(p.y(), p.x());
  if (a < 0.0) a += 2.0 * kPi;
  return a;
}

bool is_integer(double x) { return std::fabs(x - std::round(x)) < 1e-12; }

double normalize_or_throw(const IntegralResult<double>& res, const std::string& what) {
  if (!res.converged || !std::isfinite(res.value) || !(res.value > 0.0))
    raise("NormalizationDiverged", "normalization integral for " + what +
                                       " did not converge (last estimate " +
                                       std::to_string(res.value) + ")");
  return res.value;
}

// Azimuthal drift v = c (-y, x, 0) / s^2 and its analytic derivatives.
Vec3 azimuthal_v(double c, const Vec3& p) {
  const double s2 = p.x() * p.x() + p.y() * p.y();
  if (c == 0.0 || s2 < kTinyRadius * kTinyRadius) return Vec3::Zero();
  return Vec3(-c * p.y() / s2, c * p.x() / s2, 0.0);
}

Mat3 azimuthal_jac(double c, const Vec3& p) {
  Mat3 J = Mat3::Zero();
  const double s2 = p.x() * p.x() + p.y() * p.y();
  if (c == 0.0 || s2 < kTinyRadius * kTinyRadius) return J;
  const double s4 = s2 * s2;
  const double x = p.x(), y = p.y();
  J(0, 0) = 2.0 * c * x * y / s4;
  J(0, 1) = c * (y * y - x * x) / s4;
  J(1, 0) = c * (y * y - x * x) / s4;
  J(1, 1) = -2.0 * c * x * y / s4;
  return J;
}

Vec3 azimuthal_conv(double c, const Vec3& p) {
  const double s2 = p.x() * p.x() + p.y() * p.y();
  if (c == 0.0 || s2 < kTinyRadius * kTinyRadius) return Vec3::Zero();
  const double s4 = s2 * s2;
  return Vec3(-c * c * p.x() / s4, -c * c * p.y() / s4, 0.0);
}

// Flow bundle for a planar state psi = R(s) e^{i mu phi} / sqrt(A).
FlowFields planar_radial_flow(std::function<Jet3(double)> Rj, double A, double mu_eff,
                              SingularSet sing, const PhysicalConstants& consts,
                              std::string key, double rho_peak) {
  FlowFields f;
  f.dimension = 2;
  f.singular = sing;
  f.stationary = true;
  f.mu = mu_eff;
  f.consts = consts;
  f.family_key = std::move(key);
  f.rho_peak = rho_peak;

  const double c = mu_eff * consts.hbar / consts.mass;
  const double hm = consts.hbar / consts.mass;
  const double q2m = consts.hbar * consts.hbar / (2.0 * consts.mass);

  f.rho = [Rj, A](const Vec3& p) {
    const double s = std::max(in_plane_radius(p), kTinyRadius);
    const double r = Rj(s).f;
    return r * r / A;
  };
  f.v = [c](const Vec3& p) { return azimuthal_v(c, p); };
  f.jac_v = [c](const Vec3& p) { return azimuthal_jac(c, p); };
  f.conv_v = [c](const Vec3& p) { return azimuthal_conv(c, p); };
  f.j = [rho = f.rho, v = f.v](const Vec3& p) { return Vec3(rho(p) * v(p)); };

  f.grad_rho = [Rj, A](const Vec3& p) {
    const double s = in_plane_radius(p);
    if (s < kTinyRadius) return Vec3(Vec3::Zero());
    const Jet3 R = Rj(s);
    const double radial = 2.0 * R.f * R.f1 / A;
    return Vec3(radial * p.x() / s, radial * p.y() / s, 0.0);
  };
  f.u = [Rj, hm](const Vec3& p) {
    const double s = in_plane_radius(p);
    if (s < kTinyRadius) return Vec3(Vec3::Zero());
    const Jet3 R = Rj(s);
    const double g = hm * R.f1 / R.f;
    return Vec3(g * p.x() / s, g * p.y() / s, 0.0);
  };
  f.conv_u = [Rj, hm](const Vec3& p) {
    const double s = in_plane_radius(p);
    if (s < kTinyRadius) return Vec3(Vec3::Zero());
    const Jet3 R = Rj(s);
    const double g = hm * R.f1 / R.f;
    const double gp = hm * (R.f2 / R.f - (R.f1 / R.f) * (R.f1 / R.f));
    return Vec3(g * gp * p.x() / s, g * gp * p.y() / s, 0.0);
  };
  f.lap_u = [Rj, hm](const Vec3& p) {
    // Vector Laplacian of a planar radial field g(s) s-hat:
    // (g'' + g'/s - g/s^2) s-hat.
    const double s = in_plane_radius(p);
    if (s < kTinyRadius) return Vec3(Vec3::Zero());
    const Jet3 R = Rj(s);
    const double r0 = R.f, r1 = R.f1;
    const double g = hm * r1 / r0;
    const double gp = hm * (R.f2 / r0 - (r1 / r0) * (r1 / r0));
    const double gpp = hm * (R.f3 / r0 - 3.0 * r1 * R.f2 / (r0 * r0) +
                             2.0 * r1 * r1 * r1 / (r0 * r0 * r0));
    const double val = gpp + gp / s - g / (s * s);
    return Vec3(val * p.x() / s, val * p.y() / s, 0.0);
  };
  f.bohm = [Rj, q2m](const Vec3& p) {
    // (hbar^2/2m) d/ds [ (R'' + R'/s)/R ] s-hat  (planar Laplacian of R
    // over R, differentiated radially).
    const double s = in_plane_radius(p);
    if (s < kTinyRadius) return Vec3(Vec3::Zero());
    const Jet3 R = Rj(s);
    const double num = R.f2 + R.f1 / s;
    const double dnum = R.f3 + R.f2 / s - R.f1 / (s * s);
    const double qp = dnum / R.f - num * R.f1 / (R.f * R.f);
    return Vec3(q2m * qp * p.x() / s, q2m * qp * p.y() / s, 0.0);
  };
  return f;
}

// Wave function for the same planar state.
WaveFunction planar_wavefunction(std::function<Jet3(double)> Rj, double A, double mu_eff,
                                 QuantumLabels labels, SingularSet sing) {
  WaveFunction w;
  w.labels = std::move(labels);
  w.domain.dimension = 2;
  w.domain.singular = sing;
  w.domain.has_phase_cut = !is_integer(mu_eff);
  w.normalization = 1.0 / std::sqrt(A);

  const double norm = w.normalization;
  w.evaluate = [Rj, norm, mu_eff](const Vec3& p) {
    const double s = std::max(in_plane_radius(p), kTinyRadius);
    const double phase = mu_eff * azimuth(p);
    return norm * Rj(s).f * std::exp(std::complex<double>(0.0, phase));
  };
  w.gradient = [Rj, norm, mu_eff](const Vec3& p) {
    const double s = in_plane_radius(p);
    if (s < kTinyRadius) return Vec3c(Vec3c::Zero());
    const Jet3 R = Rj(s);
    const std::complex<double> ph =
        norm * std::exp(std::complex<double>(0.0, mu_eff * azimuth(p)));
    const Vec3 shat(p.x() / s, p.y() / s, 0.0);
    const Vec3 phihat(-p.y() / s, p.x() / s, 0.0);
    Vec3c g;
    for (int d = 0; d < 3; ++d)
      g[d] = ph * (R.f1 * shat[d] +
                   std::complex<double>(0.0, mu_eff) * (R.f / s) * phihat[d]);
    return g;
  };
  return w;
}

double planar_peak(const std::function<Jet3(double)>& Rj, double A, double smax) {
  double peak = 0.0;
  for (int i = 1; i <= 256; ++i) {
    const double s = smax * i / 256.0;
    peak = std::max(peak, std::fabs(Rj(s).f));
  }
  return peak / std::sqrt(A);
}

double planar_normalization(const std::function<Jet3(double)>& Rj,
                            const std::string& what) {
  QuadratureConfig cfg;
  cfg.max_subdivisions = 4000;
  auto res = integrate_half_line(
      [&Rj](double s) {
        const double r = Rj(s).f;
        return r * r * s;
      },
      cfg);
  return 2.0 * kPi * normalize_or_throw(res, what);
}

// --- hydrogen pieces -------------------------------------------------------

// Radial factor h(r) = lambda^l L_{n-l-1}^{2l+1}(lambda) e^{-lambda/2} with
// lambda = 2 r / (n a0), as an order-3 jet in r.
std::function<Jet3(double)> hydrogen_radial_jet(int n, int l, double a0) {
  const double scale = 2.0 / (n * a0);
  return [n, l, scale](double r) {
    const Jet3 lam{scale * r, scale, 0.0, 0.0};
    Jet3 powpart = (l == 0) ? Jet3::constant(1.0) : jet_pow(lam, static_cast<double>(l));
    const Jet3 lag = laguerre_jet(n - l - 1, 2.0 * l + 1.0, lam);
    const Jet3 e = jet_exp(-0.5 * lam);
    return powpart * lag * e;
  };
}

// Angular factor p(theta) = P_l^{|mu|}(cos theta) as an order-3 jet in theta.
Jet3 hydrogen_angular_jet(int l, int mu_abs, double theta) {
  if (l == 0) return Jet3::constant(1.0);
  const Jet3 t{std::cos(theta), -std::sin(theta), -std::cos(theta), std::sin(theta)};
  return legendre_assoc_jet(l, mu_abs, t);
}

struct SphericalBasis {
  double r = 0.0, s = 0.0, theta = 0.0;
  Vec3 rhat = Vec3::Zero(), thetahat = Vec3::Zero();
  bool off_axis = false;
};

SphericalBasis spherical_basis(const Vec3& p) {
  SphericalBasis b;
  b.r = p.norm();
  b.s = in_plane_radius(p);
  if (b.r < kTinyRadius) return b;
  b.theta = std::atan2(b.s, p.z());
  b.rhat = p / b.r;
  if (b.s >= kTinyRadius) {
    const double cphi = p.x() / b.s, sphi = p.y() / b.s;
    const double ct = std::cos(b.theta), st = std::sin(b.theta);
    b.thetahat = Vec3(ct * cphi, ct * sphi, -st);
    b.off_axis = true;
  }
  return b;
}

}  // namespace

std::function<Jet3(double)> radial_profile(RadialCase c, int n, double a_param,
                                           double mu, const PhysicalConstants& consts) {
  const double kappa = consts.mass * consts.omega / consts.hbar;
  return [c, n, a_param, mu, kappa](double s) {
    const Jet3 x{kappa * s * s, 2.0 * kappa * s, 2.0 * kappa, 0.0};
    Jet3 powpart = (mu == 0.0) ? Jet3::constant(1.0)
                               : jet_pow(Jet3::variable(s), mu);
    const Jet3 f = (c == RadialCase::L) ? laguerre_jet(n, mu, x)
                                        : tricomi_u_jet(a_param, mu + 1.0, x);
    const Jet3 e = jet_exp(-0.5 * x);
    return powpart * f * e;
  };
}

StatePair oscillator2d_standard(int n, int mu, const PhysicalConstants& consts) {
  if (n < 0) raise("InvalidQuantumNumbers", "oscillator radial index must be >= 0");
  const int mu_abs = std::abs(mu);
  const double kappa = consts.mass * consts.omega / consts.hbar;

  auto Rj = radial_profile(RadialCase::L, n, 0.0, static_cast<double>(mu_abs), consts);
  std::ostringstream key;
  key << "osc2d:standard:n=" << n << ":mu=" << mu;
  const double A = planar_normalization(Rj, key.str());
  const double smax = 2.0 * std::sqrt((2.0 * n + mu_abs + 6.0) / kappa);
  const double peak = planar_peak(Rj, A, smax);

  QuantumLabels labels;
  labels.family = "oscillator2d_standard";
  labels.n = n;
  labels.mu = mu;
  labels.energy = consts.hbar * consts.omega * (2.0 * n + mu_abs + 1.0);

  const SingularSet sing = (mu == 0) ? SingularSet::None : SingularSet::Origin2D;
  StatePair out;
  out.psi = planar_wavefunction(Rj, A, static_cast<double>(mu), labels, sing);
  out.psi.peak_abs = peak;
  out.flow = planar_radial_flow(Rj, A, static_cast<double>(mu), sing, consts, key.str(),
                                peak * peak);
  return out;
}

StatePair oscillator2d_nonquantized(RadialCase c, int n, double a_param, double mu,
                                    int phase_sign, const PhysicalConstants& consts) {
  if (phase_sign != 1 && phase_sign != -1)
    raise("InvalidQuantumNumbers", "phase sign must be +1 or -1");
  if (c == RadialCase::L) {
    if (n < 0 || !(mu > -1.0) || is_integer(mu))
      raise("OutOfRegime",
            "L-branch requires n >= 0 and non-integer mu > -1, got mu = " +
                std::to_string(mu));
  } else {
    if (!((mu > -1.0 && mu < 0.0) || (mu > 0.0 && mu < 1.0)))
      raise("OutOfRegime",
            "U-branch requires mu in (-1,0) or (0,1), got mu = " + std::to_string(mu));
    if (a_param <= 1e-12 && is_integer(a_param))
      raise("OutOfRegime", "U-branch requires a not a nonpositive integer");
  }

  const double kappa = consts.mass * consts.omega / consts.hbar;
  auto Rj = radial_profile(c, n, a_param, mu, consts);
  std::ostringstream key;
  if (c == RadialCase::L)
    key << "osc2d:L:n=" << n << ":mu=" << mu;
  else
    key << "osc2d:U:a=" << a_param << ":mu=" << mu;
  const double A = planar_normalization(Rj, key.str());
  const double smax = 2.0 * std::sqrt((2.0 * n + std::fabs(mu) + 6.0) / kappa);
  const double peak = planar_peak(Rj, A, smax);
  const double mu_eff = phase_sign * mu;

  QuantumLabels labels;
  labels.family = (c == RadialCase::L) ? "oscillator2d_L" : "oscillator2d_U";
  labels.n = n;
  labels.mu = mu;
  labels.a_param = a_param;
  labels.energy = (c == RadialCase::L)
                      ? consts.hbar * consts.omega * (2.0 * n + mu + 1.0)
                      : consts.hbar * consts.omega * (-2.0 * a_param + mu + 1.0);

  StatePair out;
  out.psi = planar_wavefunction(Rj, A, mu_eff, labels, SingularSet::Origin2D);
  out.psi.peak_abs = peak;
  out.flow = planar_radial_flow(Rj, A, mu_eff, SingularSet::Origin2D, consts, key.str(),
                                peak * peak);
  return out;
}

StatePair hydrogen_state(int n, int l, int mu, const PhysicalConstants& consts) {
  if (n < 1 || l < 0 || l > n - 1 || std::abs(mu) > l)
    raise("InvalidQuantumNumbers",
          "hydrogen requires n >= 1, 0 <= l <= n-1, |mu| <= l");
  const double a0 = consts.bohr_radius();
  const int mu_abs = std::abs(mu);

  auto hj = hydrogen_radial_jet(n, l, a0);

  QuadratureConfig cfg;
  cfg.max_subdivisions = 4000;
  const double Ir = normalize_or_throw(
      integrate_half_line(
          [&hj](double r) {
            const double h = hj(r).f;
            return h * h * r * r;
          },
          cfg),
      "hydrogen radial factor");
  const double Iang = normalize_or_throw(
      integrate_1d(
          [l, mu_abs](double th) {
            const double p = legendre_assoc(l, mu_abs, std::cos(th));
            return p * p * std::sin(th);
          },
          0.0, kPi, cfg),
      "hydrogen angular factor");
  const double A = 2.0 * kPi * Ir * Iang;

  // Coarse peak of |psi| for node thresholds.
  double hmax = 0.0;
  const double rmax = 15.0 * n * a0;
  for (int i = 1; i <= 256; ++i)
    hmax = std::max(hmax, std::fabs(hj(rmax * i / 256.0).f));
  double pmax = 0.0;
  for (int i = 0; i <= 64; ++i)
    pmax = std::max(pmax, std::fabs(legendre_assoc(l, mu_abs, std::cos(kPi * i / 64.0))));
  const double peak = hmax * pmax / std::sqrt(A);

  QuantumLabels labels;
  labels.family = "hydrogen";
  labels.n = n;
  labels.l = l;
  labels.mu = mu;
  labels.energy =
      -consts.hbar * consts.hbar / (2.0 * consts.mass * a0 * a0 * n * n);

  std::ostringstream key;
  key << "hydrogen:n=" << n << ":l=" << l << ":mu=" << mu;

  const double c = mu * consts.hbar / consts.mass;
  const double hm = consts.hbar / consts.mass;
  const double q2m = consts.hbar * consts.hbar / (2.0 * consts.mass);
  const double norm = 1.0 / std::sqrt(A);

  WaveFunction w;
  w.labels = labels;
  w.domain.dimension = 3;
  w.domain.singular = SingularSet::AxisZ;
  w.domain.has_phase_cut = false;
  w.normalization = norm;
  w.peak_abs = peak;
  w.evaluate = [hj, l, mu_abs, mu, norm](const Vec3& p) {
    const double r = std::max(p.norm(), kTinyRadius);
    const double theta = std::atan2(in_plane_radius(p), p.z());
    const double val = hj(r).f * legendre_assoc(l, mu_abs, std::cos(theta));
    return norm * val * std::exp(std::complex<double>(0.0, mu * azimuth(p)));
  };
  w.gradient = [hj, l, mu_abs, mu, norm](const Vec3& p) {
    const SphericalBasis b = spherical_basis(p);
    if (!b.off_axis) return Vec3c(Vec3c::Zero());
    const Jet3 h = hj(b.r);
    const Jet3 pj = hydrogen_angular_jet(l, mu_abs, b.theta);
    const std::complex<double> ph =
        norm * std::exp(std::complex<double>(0.0, mu * azimuth(p)));
    const Vec3 phihat(-p.y() / b.s, p.x() / b.s, 0.0);
    Vec3c g;
    for (int d = 0; d < 3; ++d)
      g[d] = ph * (h.f1 * pj.f * b.rhat[d] + (h.f * pj.f1 / b.r) * b.thetahat[d] +
                   std::complex<double>(0.0, mu) * (h.f * pj.f / b.s) * phihat[d]);
    return g;
  };

  FlowFields f;
  f.dimension = 3;
  f.singular = SingularSet::AxisZ;
  f.stationary = true;
  f.mu = mu;
  f.consts = consts;
  f.family_key = key.str();
  f.rho_peak = peak * peak;

  f.rho = [hj, l, mu_abs, A](const Vec3& p) {
    const double r = std::max(p.norm(), kTinyRadius);
    const double theta = std::atan2(in_plane_radius(p), p.z());
    const double h = hj(r).f;
    const double pv = legendre_assoc(l, mu_abs, std::cos(theta));
    return h * h * pv * pv / A;
  };
  f.v = [c](const Vec3& p) { return azimuthal_v(c, p); };
  f.jac_v = [c](const Vec3& p) { return azimuthal_jac(c, p); };
  f.conv_v = [c](const Vec3& p) { return azimuthal_conv(c, p); };
  f.j = [rho = f.rho, v = f.v](const Vec3& p) { return Vec3(rho(p) * v(p)); };

  f.grad_rho = [hj, l, mu_abs, A](const Vec3& p) {
    const SphericalBasis b = spherical_basis(p);
    if (!b.off_axis) return Vec3(Vec3::Zero());
    const Jet3 h = hj(b.r);
    const Jet3 pj = hydrogen_angular_jet(l, mu_abs, b.theta);
    const double dr = 2.0 * h.f * h.f1 * pj.f * pj.f / A;
    const double dth = 2.0 * h.f * h.f * pj.f * pj.f1 / (A * b.r);
    return Vec3(dr * b.rhat + dth * b.thetahat);
  };
  f.u = [hj, l, mu_abs, hm](const Vec3& p) {
    const SphericalBasis b = spherical_basis(p);
    if (!b.off_axis) return Vec3(Vec3::Zero());
    const Jet3 h = hj(b.r);
    const Jet3 pj = hydrogen_angular_jet(l, mu_abs, b.theta);
    return Vec3(hm * ((h.f1 / h.f) * b.rhat + (pj.f1 / pj.f) / b.r * b.thetahat));
  };
  f.bohm = [hj, l, mu_abs, q2m](const Vec3& p) {
    // q := lap(sqrt(rho))/sqrt(rho) = (h'' + 2h'/r)/h + (p'' + cot(th) p')/(r^2 p);
    // the force is (hbar^2/2m) grad q in spherical components.
    const SphericalBasis b = spherical_basis(p);
    if (!b.off_axis) return Vec3(Vec3::Zero());
    const Jet3 h = hj(b.r);
    const Jet3 pj = hydrogen_angular_jet(l, mu_abs, b.theta);
    const double r = b.r;
    const double ct = std::cos(b.theta), st = std::sin(b.theta);
    const double cot = ct / st, csc2 = 1.0 / (st * st);
    const double num_r = h.f2 + 2.0 * h.f1 / r;
    const double dnum_r = h.f3 + 2.0 * h.f2 / r - 2.0 * h.f1 / (r * r);
    const double ang = pj.f2 + cot * pj.f1;
    const double dang = pj.f3 + cot * pj.f2 - csc2 * pj.f1;
    const double Fr = dnum_r / h.f - num_r * h.f1 / (h.f * h.f) -
                      2.0 * ang / (pj.f * r * r * r);
    const double Fth = (dang / pj.f - ang * pj.f1 / (pj.f * pj.f)) / (r * r * r);
    return Vec3(q2m * (Fr * b.rhat + Fth * b.thetahat));
  };

  StatePair out;
  out.psi = std::move(w);
  out.flow = std::move(f);
  return out;
}

WaveFunction phi_a_superposition(int n, double a_mix, const PhysicalConstants& consts) {
  if (n <= 1) raise("InvalidQuantumNumbers", "superposition requires n > 1");
  if (!(a_mix >= -1.0 && a_mix <= 1.0))
    raise("InvalidQuantumNumbers", "mixing parameter must lie in [-1, 1]");
  const double a0 = consts.bohr_radius();
  auto hj = hydrogen_radial_jet(n, 1, a0);

  QuadratureConfig cfg;
  cfg.max_subdivisions = 4000;
  const double Ir = normalize_or_throw(
      integrate_half_line(
          [&hj](double r) {
            const double h = hj(r).f;
            return h * h * r * r;
          },
          cfg),
      "superposition radial factor");
  // |Phi_a|^2 integrates to C^2 (4pi/3)(1+a^2) Ir.
  const double C = std::sqrt(3.0 / (4.0 * kPi * (1.0 + a_mix * a_mix) * Ir));

  WaveFunction w;
  w.labels.family = "phi_a_superposition";
  w.labels.n = n;
  w.labels.l = 1;
  w.labels.a_mix = a_mix;
  w.labels.energy =
      -consts.hbar * consts.hbar / (2.0 * consts.mass * a0 * a0 * n * n);
  w.domain.dimension = 3;
  w.domain.singular = SingularSet::AxisZ;
  w.normalization = C;

  const double a = a_mix;
  w.evaluate = [hj, C, a](const Vec3& p) {
    const double r = p.norm();
    if (r < kTinyRadius) return std::complex<double>(0.0, 0.0);
    return C * hj(r).f * std::complex<double>(p.y() / r, -a * p.x() / r);
  };
  w.gradient = [hj, C, a](const Vec3& p) {
    const double r = p.norm();
    if (r < kTinyRadius) return Vec3c(Vec3c::Zero());
    const Jet3 h = hj(r);
    const std::complex<double> ang(p.y() / r, -a * p.x() / r);
    const Vec3 rhat = p / r;
    const std::complex<double> radial = C * (h.f1 - h.f / r) * ang;
    Vec3c g;
    for (int d = 0; d < 3; ++d) g[d] = radial * rhat[d];
    g[0] += C * (h.f / r) * std::complex<double>(0.0, -a);
    g[1] += C * (h.f / r);
    return g;
  };

  double hmax = 0.0;
  const double rmax = 15.0 * n * a0;
  for (int i = 1; i <= 256; ++i)
    hmax = std::max(hmax, std::fabs(hj(rmax * i / 256.0).f));
  w.peak_abs = C * hmax * std::max(1.0, std::fabs(a));
  return w;
}

FlowFields oscillator3d_ground_nelson(const PhysicalConstants& consts) {
  const double kappa = consts.mass * consts.omega / consts.hbar;
  QuadratureConfig cfg;
  const double A =
      4.0 * kPi *
      normalize_or_throw(integrate_half_line(
                             [kappa](double r) {
                               return std::exp(-kappa * r * r) * r * r;
                             },
                             cfg),
                         "3-D oscillator ground state");
  const double omega = consts.omega;
  const double mw2 = consts.mass * omega * omega;

  FlowFields f;
  f.dimension = 3;
  f.singular = SingularSet::None;
  f.stationary = true;
  f.mu = 0.0;
  f.consts = consts;
  f.family_key = "osc3d:ground";
  f.rho_peak = 1.0 / A;

  f.rho = [kappa, A](const Vec3& p) { return std::exp(-kappa * p.squaredNorm()) / A; };
  f.v = [](const Vec3&) { return Vec3(Vec3::Zero()); };
  f.u = [omega](const Vec3& p) { return Vec3(-omega * p); };
  f.j = [](const Vec3&) { return Vec3(Vec3::Zero()); };
  f.grad_rho = [kappa, A, rho = f.rho](const Vec3& p) {
    return Vec3(-2.0 * kappa * rho(p) * p);
  };
  f.jac_v = [](const Vec3&) { return Mat3(Mat3::Zero()); };
  f.conv_v = [](const Vec3&) { return Vec3(Vec3::Zero()); };
  f.conv_u = [omega](const Vec3& p) { return Vec3(omega * omega * p); };
  f.lap_u = [](const Vec3&) { return Vec3(Vec3::Zero()); };
  f.bohm = [mw2](const Vec3& p) { return Vec3(mw2 * p); };
  return f;
}

WaveFunction oscillator3d_ground_wavefunction(const PhysicalConstants& consts) {
  const double kappa = consts.mass * consts.omega / consts.hbar;
  QuadratureConfig cfg;
  const double A =
      4.0 * kPi *
      normalize_or_throw(integrate_half_line(
                             [kappa](double r) {
                               return std::exp(-kappa * r * r) * r * r;
                             },
                             cfg),
                         "3-D oscillator ground state");
  const double norm = 1.0 / std::sqrt(A);

  WaveFunction w;
  w.labels.family = "oscillator3d_ground";
  w.labels.energy = 1.5 * consts.hbar * consts.omega;
  w.domain.dimension = 3;
  w.domain.singular = SingularSet::None;
  w.normalization = norm;
  w.peak_abs = norm;
  w.evaluate = [kappa, norm](const Vec3& p) {
    return std::complex<double>(norm * std::exp(-0.5 * kappa * p.squaredNorm()), 0.0);
  };
  w.gradient = [kappa, norm, ev = w.evaluate](const Vec3& p) {
    const std::complex<double> val = ev(p);
    Vec3c g;
    for (int d = 0; d < 3; ++d) g[d] = -kappa * p[d] * val;
    return g;
  };
  return w;
}

IntegrabilityReport radial_integrability_probe(RadialCase c, int n, double a_param,
                                               double mu,
                                               const std::vector<double>& cutoffs,
                                               const PhysicalConstants& consts) {
  IntegrabilityReport rep;
  rep.cutoffs = cutoffs.empty() ? std::vector<double>{2, 4, 8, 16, 32, 64} : cutoffs;
  auto Rj = radial_profile(c, n, a_param, mu, consts);

  QuadratureConfig cfg;
  cfg.rel_tol = 1e-9;
  cfg.max_subdivisions = 4000;
  for (double cut : rep.cutoffs) {
    if (!(cut > 1.0)) raise("InvalidQuantumNumbers", "cutoffs must exceed 1");
    auto res = integrate_1d(
        [&Rj](double s) {
          const double r = Rj(s).f;
          return r * r * s;
        },
        1.0 / cut, cut, cfg);
    if (!std::isfinite(res.value)) raise("NonFinite", "integrability probe overflowed");
    rep.integrals.push_back(res.value);
  }
  for (std::size_t k = 1; k < rep.integrals.size(); ++k)
    rep.increments.push_back(rep.integrals[k] - rep.integrals[k - 1]);

  // Convergent when the shell increments die away geometrically; if the last
  // increment fails to shrink below 90% of its predecessor (or grows), the
  // tail/origin contribution is not summable.
  const double last = rep.increments.back();
  const double prev = rep.increments[rep.increments.size() - 2];
  const double scale = std::max(std::fabs(rep.integrals.back()), 1.0);
  if (std::fabs(last) <= 1e-12 * scale)
    rep.verdict = ConvergenceVerdict::Convergent;
  else
    rep.verdict = (std::fabs(last) > 0.9 * std::fabs(prev))
                      ? ConvergenceVerdict::Divergent
                      : ConvergenceVerdict::Convergent;
  return rep;
}

StatePair state_from_key(const std::string& key, const PhysicalConstants& consts) {
  std::vector<std::string> parts;
  std::stringstream ss(key);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  if (parts.empty()) raise("InvalidQuantumNumbers", "empty family key");

  std::map<std::string, double> kv;
  std::string sub;
  std::size_t first_kv = parts.size();
  for (std::size_t i = 1; i < parts.size(); ++i) {
    const auto eq = parts[i].find('=');
    if (eq == std::string::npos) {
      if (i == 1) {
        sub = parts[i];
        continue;
      }
      raise("InvalidQuantumNumbers", "malformed key segment '" + parts[i] + "'");
    }
    first_kv = std::min(first_kv, i);
    try {
      kv[parts[i].substr(0, eq)] = std::stod(parts[i].substr(eq + 1));
    } catch (const std::exception&) {
      raise("InvalidQuantumNumbers", "malformed value in '" + parts[i] + "'");
    }
  }
  auto get = [&kv, &key](const std::string& name) {
    auto it = kv.find(name);
    if (it == kv.end())
      raise("InvalidQuantumNumbers", "key '" + key + "' lacks parameter " + name);
    return it->second;
  };

  if (parts[0] == "osc2d") {
    if (sub == "standard")
      return oscillator2d_standard(static_cast<int>(get("n")),
                                   static_cast<int>(get("mu")), consts);
    if (sub == "L")
      return oscillator2d_nonquantized(RadialCase::L, static_cast<int>(get("n")), 0.0,
                                       get("mu"), +1, consts);
    if (sub == "U")
      return oscillator2d_nonquantized(RadialCase::U, 0, get("a"), get("mu"), +1,
                                       consts);
    raise("InvalidQuantumNumbers", "unknown oscillator branch '" + sub + "'");
  }
  if (parts[0] == "hydrogen")
    return hydrogen_state(static_cast<int>(get("n")), static_cast<int>(get("l")),
                          static_cast<int>(get("mu")), consts);
  if (parts[0] == "phi_a") {
    StatePair out;
    out.psi = phi_a_superposition(static_cast<int>(get("n")), get("a"), consts);
    out.has_flow = false;
    return out;
  }
  if (parts[0] == "osc3d") {
    StatePair out;
    out.psi = oscillator3d_ground_wavefunction(consts);
    out.flow = oscillator3d_ground_nelson(consts);
    return out;
  }
  raise("InvalidQuantumNumbers", "unknown family '" + parts[0] + "'");
}

}  // namespace qhydro
