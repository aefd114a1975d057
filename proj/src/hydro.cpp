#include "qhydro/hydro.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

namespace qhydro {

namespace {

// Fourth-order central difference of a complex-valued line function.
std::complex<double> complex_d1(const std::function<std::complex<double>(double)>& g,
                                double h, int order) {
  if (order >= 4) return (-g(2 * h) + 8.0 * g(h) - 8.0 * g(-h) + g(-2 * h)) / (12.0 * h);
  return (g(h) - g(-h)) / (2.0 * h);
}

Vec3c complex_gradient_fd(const std::function<std::complex<double>(const Vec3&)>& f,
                          const Vec3& p, const FdConfig& c) {
  Vec3c g;
  for (int d = 0; d < 3; ++d) {
    auto line = [&f, &p, d](double t) {
      Vec3 q = p;
      q[d] += t;
      return f(q);
    };
    g[d] = complex_d1(line, c.step, c.order);
  }
  return g;
}

// Shared lattice sweep: applies the singular-set clearance, accumulates max
// and root-mean-square statistics, and optionally keeps the per-point table.
template <class F>
ResidualReport sweep_lattice(std::string tag, const GridSpec& grid, SingularSet sing,
                             double min_singular_distance, bool collect, F&& resid) {
  ResidualReport report;
  report.equation_tag = std::move(tag);
  const double clearance = (sing == SingularSet::None) ? 0.0 : min_singular_distance;
  report.excluded_radius = clearance;
  if (collect) report.per_point.emplace();
  double sumsq = 0.0;
  for (const Vec3& p : grid.lattice_points()) {
    if (sing != SingularSet::None && distance_to_singular(p, sing) < clearance) continue;
    const double r = resid(p);
    report.max_abs_residual = std::max(report.max_abs_residual, r);
    sumsq += r * r;
    ++report.sample_count;
    if (collect) report.per_point->push_back({p, r});
  }
  if (report.sample_count == 0)
    throw std::invalid_argument("residual sweep '" + report.equation_tag +
                                "': no lattice points outside the excluded regions");
  report.l2_residual = std::sqrt(sumsq / report.sample_count);
  return report;
}

}  // namespace

// ---------------------------------------------------------------------------
// Potentials

Potential constant_potential(double level) {
  Potential V;
  V.tag = "constant";
  V.value = [level](const Vec3&) { return level; };
  V.gradient = [](const Vec3&) { return Vec3(Vec3::Zero()); };
  return V;
}

Potential harmonic_potential(const PhysicalConstants& consts, int dimension) {
  if (dimension < 1 || dimension > 3)
    throw std::invalid_argument("harmonic_potential: dimension must be 1, 2, or 3");
  Potential V;
  V.tag = (dimension == 2) ? "harmonic2d" : (dimension == 3 ? "harmonic3d" : "harmonic1d");
  const double k = consts.mass * consts.omega * consts.omega;
  V.value = [k, dimension](const Vec3& p) {
    double r2 = 0.0;
    for (int d = 0; d < dimension; ++d) r2 += p[d] * p[d];
    return 0.5 * k * r2;
  };
  V.gradient = [k, dimension](const Vec3& p) {
    Vec3 g = Vec3::Zero();
    for (int d = 0; d < dimension; ++d) g[d] = k * p[d];
    return g;
  };
  return V;
}

Potential coulomb_potential(const PhysicalConstants& consts) {
  Potential V;
  V.tag = "coulomb";
  const double k = consts.coulomb_strength();
  V.value = [k](const Vec3& p) { return -k / p.norm(); };
  V.gradient = [k](const Vec3& p) {
    const double r = p.norm();
    return Vec3(k * p / (r * r * r));
  };
  return V;
}

Potential potential_for(const FlowFields& flow) {
  const std::string& key = flow.family_key;
  if (key.rfind("osc2d:", 0) == 0) return harmonic_potential(flow.consts, 2);
  if (key.rfind("osc3d:", 0) == 0) return harmonic_potential(flow.consts, 3);
  if (key.rfind("hydrogen:", 0) == 0) return coulomb_potential(flow.consts);
  raise("InvalidQuantumNumbers", "no canonical potential for family key '" + key + "'");
}

// ---------------------------------------------------------------------------
// Wave function -> flow bundle

FlowFields madelung_transform(const WaveFunction& psi, const PhysicalConstants& consts,
                              const TransformConfig& cfg) {
  FlowFields f;
  f.dimension = psi.domain.dimension;
  f.singular = psi.domain.singular;
  f.stationary = true;
  f.mu = psi.labels.mu;
  f.consts = consts;
  f.family_key = "transform:" + psi.labels.family;
  f.rho_peak = psi.peak_abs * psi.peak_abs;

  const double hm = consts.hbar / consts.mass;
  const double eps_node = cfg.node_tolerance_factor * psi.peak_abs;
  const auto eval = psi.evaluate;
  std::function<Vec3c(const Vec3&)> grad = psi.gradient;
  if (!grad) {
    const FdConfig fd = cfg.fd;
    grad = [eval, fd](const Vec3& p) { return complex_gradient_fd(eval, p, fd); };
  }

  f.rho = [eval](const Vec3& p) { return std::norm(eval(p)); };
  f.grad_rho = [eval, grad](const Vec3& p) {
    const std::complex<double> z = eval(p);
    const Vec3c g = grad(p);
    Vec3 out;
    for (int d = 0; d < 3; ++d) out[d] = 2.0 * std::real(std::conj(z) * g[d]);
    return out;
  };
  f.v = [eval, grad, hm, eps_node](const Vec3& p) {
    const std::complex<double> z = eval(p);
    if (std::abs(z) <= eps_node)
      raise("NodeEncountered", "drift field requested on a node of the wave function");
    const Vec3c g = grad(p);
    Vec3 out;
    for (int d = 0; d < 3; ++d) out[d] = hm * std::imag(g[d] / z);
    return out;
  };
  f.u = [eval, grad, hm, eps_node](const Vec3& p) {
    const std::complex<double> z = eval(p);
    if (std::abs(z) <= eps_node)
      raise("NodeEncountered", "osmotic field requested on a node of the wave function");
    const Vec3c g = grad(p);
    Vec3 out;
    for (int d = 0; d < 3; ++d) out[d] = hm * std::real(g[d] / z);
    return out;
  };
  f.j = [eval, grad, hm](const Vec3& p) {
    const std::complex<double> z = eval(p);
    const Vec3c g = grad(p);
    Vec3 out;
    for (int d = 0; d < 3; ++d) out[d] = hm * std::imag(std::conj(z) * g[d]);
    return out;
  };
  return f;
}

// ---------------------------------------------------------------------------
// Quantum force

Vec3 bohm_force_fd(const ScalarField& rho, const Vec3& p, const PhysicalConstants& consts,
                   const BohmConfig& cfg) {
  auto sqrt_rho = [&rho](const Vec3& q) {
    const double r = rho(q);
    if (!(r > 0.0))
      raise("StencilTouchesNode", "density nonpositive at a quantum-force stencil sample");
    return std::sqrt(r);
  };
  auto ratio = [&sqrt_rho, &cfg](const Vec3& q) {
    return fd_laplacian(sqrt_rho, q, cfg.inner) / sqrt_rho(q);
  };
  const double q2m = consts.hbar * consts.hbar / (2.0 * consts.mass);
  return q2m * fd_gradient(ratio, p, cfg.outer);
}

Vec3 bohm_force(const FlowFields& flow, const Vec3& p, const BohmConfig& cfg) {
  if (flow.bohm) return flow.bohm(p);
  return bohm_force_fd(flow.rho, p, flow.consts, cfg);
}

// ---------------------------------------------------------------------------
// Momentum / continuity / irrotationality residuals

MadelungReports madelung_residual(const FlowFields& flow, const Potential& V,
                                  const GridSpec& grid, const ResidualOptions& opt) {
  const double m = flow.consts.mass;
  const bool an = opt.prefer_analytic;

  auto momentum = [&](const Vec3& p) {
    const Vec3 conv = (an && flow.conv_v) ? flow.conv_v(p) : fd_convective(flow.v, p, opt.fd);
    const Vec3 gV = V.gradient ? V.gradient(p) : fd_gradient(V.value, p, opt.fd);
    const Vec3 force = (an && flow.bohm) ? flow.bohm(p)
                                         : bohm_force_fd(flow.rho, p, flow.consts, opt.bohm);
    return (m * conv + gV - force).norm();
  };
  auto continuity = [&](const Vec3& p) {
    if (an && flow.grad_rho && flow.jac_v)
      return std::fabs(flow.grad_rho(p).dot(flow.v(p)) + flow.rho(p) * flow.jac_v(p).trace());
    return std::fabs(fd_divergence(flow.j, p, opt.fd));
  };

  MadelungReports out;
  out.momentum = sweep_lattice("madelung_momentum", grid, flow.singular,
                               opt.min_singular_distance, opt.collect_per_point, momentum);
  out.continuity = sweep_lattice("madelung_continuity", grid, flow.singular,
                                 opt.min_singular_distance, opt.collect_per_point, continuity);
  return out;
}

ResidualReport third_madelung_pointwise(const FlowFields& flow, const GridSpec& grid,
                                        const ResidualOptions& opt) {
  auto curl_mag = [&](const Vec3& p) {
    if (opt.prefer_analytic && flow.jac_v) {
      const Mat3 J = flow.jac_v(p);
      return Vec3(J(2, 1) - J(1, 2), J(0, 2) - J(2, 0), J(1, 0) - J(0, 1)).norm();
    }
    return fd_curl(flow.v, p, opt.fd).norm();
  };
  return sweep_lattice("curl_v", grid, flow.singular, opt.min_singular_distance,
                       opt.collect_per_point, curl_mag);
}

NelsonReports nelson_residual(const FlowFields& flow, const Potential& V,
                              const GridSpec& grid, const ResidualOptions& opt) {
  const double m = flow.consts.mass;
  const double hbar = flow.consts.hbar;
  const bool an = opt.prefer_analytic;

  auto momentum = [&](const Vec3& p) {
    const Vec3 conv_v = (an && flow.conv_v) ? flow.conv_v(p) : fd_convective(flow.v, p, opt.fd);
    const Vec3 conv_u = (an && flow.conv_u) ? flow.conv_u(p) : fd_convective(flow.u, p, opt.fd);
    const Vec3 lap_u =
        (an && flow.lap_u) ? flow.lap_u(p) : fd_vector_laplacian(flow.u, p, opt.fd);
    const Vec3 gV = V.gradient ? V.gradient(p) : fd_gradient(V.value, p, opt.fd);
    return (m * conv_v + gV - m * conv_u - 0.5 * hbar * lap_u).norm();
  };
  auto osmotic = [&](const Vec3& p) {
    auto scalar = [&](const Vec3& q) {
      const double div_v =
          (an && flow.jac_v) ? flow.jac_v(q).trace() : fd_divergence(flow.v, q, opt.fd);
      return flow.v(q).dot(flow.u(q)) + 0.5 * hbar / m * div_v;
    };
    return fd_gradient(scalar, p, opt.fd).norm();
  };

  NelsonReports out;
  out.momentum = sweep_lattice("nelson_momentum", grid, flow.singular,
                               opt.min_singular_distance, opt.collect_per_point, momentum);
  out.osmotic = sweep_lattice("nelson_osmotic", grid, flow.singular,
                              opt.min_singular_distance, opt.collect_per_point, osmotic);
  return out;
}

// ---------------------------------------------------------------------------
// Vorticity transport

TimeVectorField freeze_in_time(const FlowFields& flow) {
  TimeVectorField out;
  out.v = [v = flow.v](double, const Vec3& p) { return v(p); };
  out.singular = flow.singular;
  return out;
}

ResidualReport vorticity_evolution_residual(const TimeVectorField& field, double t,
                                            const GridSpec& grid,
                                            const VorticityOptions& opt) {
  auto omega_at = [&field, &opt](double tt, const Vec3& q) {
    auto vt = [&field, tt](const Vec3& r) { return field.v(tt, r); };
    return fd_curl(vt, q, opt.inner);
  };
  auto resid = [&](const Vec3& p) {
    const double dt = opt.time_step;
    const Vec3 dwdt = (-omega_at(t + 2 * dt, p) + 8.0 * omega_at(t + dt, p) -
                       8.0 * omega_at(t - dt, p) + omega_at(t - 2 * dt, p)) /
                      (12.0 * dt);
    auto cross = [&](const Vec3& q) { return Vec3(field.v(t, q).cross(omega_at(t, q))); };
    const Vec3 rhs = fd_curl(cross, p, opt.outer);
    return (dwdt - rhs).norm();
  };
  return sweep_lattice("vorticity_transport", grid, field.singular,
                       opt.min_singular_distance, opt.collect_per_point, resid);
}

ResidualReport vorticity_formulation_gap(const TimeVectorField& field, double t,
                                         const GridSpec& grid,
                                         const VorticityOptions& opt) {
  auto vt = [&field, t](const Vec3& q) { return field.v(t, q); };
  auto omega = [&vt, &opt](const Vec3& q) { return fd_curl(vt, q, opt.inner); };
  auto gap = [&](const Vec3& p) {
    auto cross = [&](const Vec3& q) { return Vec3(vt(q).cross(omega(q))); };
    const Vec3 curl_form = fd_curl(cross, p, opt.outer);
    const Mat3 Jv = fd_jacobian(vt, p, opt.inner);
    const Mat3 Jw = fd_jacobian(omega, p, opt.outer);
    const Vec3 om = omega(p);
    const Vec3 identity_form = Jv * om - Jv.trace() * om - Jw * vt(p);
    return (curl_form - identity_form).norm();
  };
  return sweep_lattice("vorticity_formulation_gap", grid, field.singular,
                       opt.min_singular_distance, opt.collect_per_point, gap);
}

// ---------------------------------------------------------------------------
// Smooth positive scalar fields

SmoothScalarField gaussian_scalar_field(double amplitude, double beta, const Vec3& center) {
  if (!(amplitude > 0.0 && beta > 0.0))
    throw std::invalid_argument("gaussian_scalar_field: amplitude and beta must be positive");
  SmoothScalarField f;
  f.tag = "gaussian";
  f.value = [amplitude, beta, center](const Vec3& p) {
    return amplitude * std::exp(-beta * (p - center).squaredNorm());
  };
  f.grad = [f, beta, center](const Vec3& p) {
    return Vec3(-2.0 * beta * (p - center) * f.value(p));
  };
  f.hess = [f, beta, center](const Vec3& p) {
    const Vec3 d = p - center;
    const double val = f.value(p);
    Mat3 H = 4.0 * beta * beta * val * (d * d.transpose());
    H -= 2.0 * beta * val * Mat3::Identity();
    return H;
  };
  f.grad_lap = [f, beta, center](const Vec3& p) {
    const Vec3 d = p - center;
    const double r2 = d.squaredNorm();
    return Vec3((20.0 * beta * beta - 8.0 * beta * beta * beta * r2) * d * f.value(p));
  };
  return f;
}

SmoothScalarField exp_linear_scalar_field(const Vec3& k, double offset) {
  SmoothScalarField f;
  f.tag = "exp-linear";
  f.value = [k, offset](const Vec3& p) { return std::exp(k.dot(p) + offset); };
  f.grad = [f, k](const Vec3& p) { return Vec3(k * f.value(p)); };
  f.hess = [f, k](const Vec3& p) { return Mat3(k * k.transpose() * f.value(p)); };
  f.grad_lap = [f, k](const Vec3& p) { return Vec3(k.squaredNorm() * k * f.value(p)); };
  return f;
}

SmoothScalarField trig_scalar_field(double floor_level, const std::vector<TrigMode>& modes) {
  double amp_sum = 0.0;
  for (const auto& m : modes) amp_sum += std::fabs(m.amplitude);
  if (!(floor_level > amp_sum))
    throw std::invalid_argument(
        "trig_scalar_field: floor level must exceed the sum of mode amplitudes");
  SmoothScalarField f;
  f.tag = "trig-sum";
  f.value = [floor_level, modes](const Vec3& p) {
    double s = floor_level;
    for (const auto& m : modes) s += m.amplitude * std::cos(m.wavevector.dot(p) + m.phase);
    return s;
  };
  f.grad = [modes](const Vec3& p) {
    Vec3 g = Vec3::Zero();
    for (const auto& m : modes)
      g -= m.amplitude * std::sin(m.wavevector.dot(p) + m.phase) * m.wavevector;
    return g;
  };
  f.hess = [modes](const Vec3& p) {
    Mat3 H = Mat3::Zero();
    for (const auto& m : modes)
      H -= m.amplitude * std::cos(m.wavevector.dot(p) + m.phase) *
           (m.wavevector * m.wavevector.transpose());
    return H;
  };
  f.grad_lap = [modes](const Vec3& p) {
    Vec3 g = Vec3::Zero();
    for (const auto& m : modes)
      g += m.amplitude * m.wavevector.squaredNorm() *
           std::sin(m.wavevector.dot(p) + m.phase) * m.wavevector;
    return g;
  };
  return f;
}

ResidualReport nottale_identity_check(const SmoothScalarField& phi, double alpha,
                                      const GridSpec& grid, const NottaleOptions& opt) {
  if (!(alpha > 0.0))
    throw std::invalid_argument("nottale_identity_check: alpha must be positive");
  auto pow_phi = [&phi, alpha](const Vec3& q) { return std::pow(phi.value(q), alpha); };
  auto ratio = [&pow_phi, &opt](const Vec3& q) {
    return fd_laplacian(pow_phi, q, opt.inner) / pow_phi(q);
  };
  auto resid = [&](const Vec3& p) {
    const Vec3 lhs = fd_gradient(ratio, p, opt.outer) / alpha;
    const double f = phi.value(p);
    const Vec3 g = phi.grad(p);
    const Mat3 H = phi.hess(p);
    const Vec3 t = phi.grad_lap(p);
    const double lap = H.trace();
    const double g2 = g.squaredNorm();
    const Vec3 Hg = H * g;
    const Vec3 lap_gradln =
        t / f - 2.0 * Hg / (f * f) - g * lap / (f * f) + 2.0 * g * g2 / (f * f * f);
    const Vec3 conv_gradln = Hg / (f * f) - g * g2 / (f * f * f);
    return (lhs - (lap_gradln + 2.0 * alpha * conv_gradln)).norm();
  };
  return sweep_lattice("log_derivative_identity", grid, SingularSet::None, 0.0,
                       opt.collect_per_point, resid);
}

ResidualReport weber_identity_check(const VectorField& w, const GridSpec& grid,
                                    const ResidualOptions& opt) {
  auto resid = [&](const Vec3& p) {
    const Vec3 conv = fd_convective(w, p, opt.fd);
    auto half_sq = [&w](const Vec3& q) { return 0.5 * w(q).squaredNorm(); };
    return (conv - fd_gradient(half_sq, p, opt.fd)).norm();
  };
  return sweep_lattice("convective_gradient_identity", grid, SingularSet::None, 0.0,
                       opt.collect_per_point, resid);
}

// ---------------------------------------------------------------------------
// Generalized irrotationality pairing

std::vector<PairingResidual> antonelli_irrotationality_residual(
    const WaveFunction& psi, const std::vector<VectorTestFunction>& tests,
    const PhysicalConstants& consts, const AntonelliConfig& cfg) {
  const double hm = consts.hbar / consts.mass;
  const double eps_node = cfg.node_tolerance_factor * psi.peak_abs;
  const auto eval = psi.evaluate;
  std::function<Vec3c(const Vec3&)> grad = psi.gradient;
  if (!grad)
    grad = [eval](const Vec3& p) { return complex_gradient_fd(eval, p, FdConfig{1e-4, 4}); };

  std::vector<PairingResidual> out;
  out.reserve(tests.size());
  int index = 0;
  for (const auto& test : tests) {
    GridSpec region;
    region.dimension = psi.domain.dimension;
    for (int d = 0; d < region.dimension; ++d)
      region.extents[d] = {test.support.lo[d], test.support.hi[d]};
    region.points_per_axis = 8;
    if (psi.domain.singular != SingularSet::None && cfg.exclusion_radius > 0.0)
      region.excluded.push_back(cylinder_region(cfg.exclusion_radius));

    auto lhs_integrand = [&](const Vec3& p) {
      const std::complex<double> z = eval(p);
      const Vec3c g = grad(p);
      Vec3 j;
      for (int d = 0; d < 3; ++d) j[d] = hm * std::imag(std::conj(z) * g[d]);
      return j.dot(test.curl(p));
    };
    auto rhs_integrand = [&](const Vec3& p) {
      const std::complex<double> z = eval(p);
      const double absz = std::abs(z);
      if (absz <= eps_node)
        raise("NodeEncountered", "polar factor requested on a node of the wave function");
      const Vec3c g = grad(p);
      Vec3 grad_sqrt, lambda;
      for (int d = 0; d < 3; ++d) {
        const std::complex<double> w = std::conj(z) * g[d];
        grad_sqrt[d] = std::real(w) / absz;
        lambda[d] = hm * std::imag(w) / absz;
      }
      return 2.0 * grad_sqrt.cross(lambda).dot(test.value(p));
    };

    const auto lhs = integrate_region(lhs_integrand, region, cfg.quad);
    const auto rhs = integrate_region(rhs_integrand, region, cfg.quad);
    PairingResidual pr;
    pr.test_label = "test" + std::to_string(index++) + ":" + test.family_tag;
    pr.lhs = lhs.value;
    pr.rhs = rhs.value;
    pr.residual = std::fabs(lhs.value - rhs.value);
    out.push_back(std::move(pr));
  }
  return out;
}

}  // namespace qhydro
