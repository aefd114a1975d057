// Strong-form residual evaluators for quantum-hydrodynamic flows.
//
// Contents: scalar potentials with analytic gradients, the map from a wave
// function to its hydrodynamic bundle (density, drift, osmotic velocity,
// current), the quantum-force field, pointwise residual reports for the
// momentum/continuity/irrotationality equations and for their stochastic-
// mechanics counterparts, the vorticity transport equation, two classical
// differential identities (the log-derivative identity used to rewrite the
// quantum force, and the convective-gradient identity for irrotational
// fields), and a distributional generalized-irrotationality pairing.
//
// Every evaluator offers two routes: analytic derivative closures carried by
// the flow bundle when present, and nested central finite differences on the
// plain field closures otherwise.  Tests pin the two routes against each
// other, so neither route may silently reuse the other's intermediates.
#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qhydro/constants.hpp"
#include "qhydro/errors.hpp"
#include "qhydro/numerics/finite_diff.hpp"
#include "qhydro/numerics/grid.hpp"
#include "qhydro/numerics/quadrature.hpp"
#include "qhydro/numerics/test_function.hpp"
#include "qhydro/states.hpp"

namespace qhydro {

// ---------------------------------------------------------------------------
// Potentials

// Scalar potential with an analytic gradient closure.
struct Potential {
  std::string tag = "zero";
  std::function<double(const Vec3&)> value;
  std::function<Vec3(const Vec3&)> gradient;
};

Potential constant_potential(double level = 0.0);

// V = (m w^2 / 2) r^2 with r taken over the first `dimension` coordinates.
Potential harmonic_potential(const PhysicalConstants& consts = {}, int dimension = 2);

// Attractive V = -e^2 / (4 pi eps0 r); singular at the origin.
Potential coulomb_potential(const PhysicalConstants& consts = {});

// The confining potential a family key's flow is stationary under
// ("osc2d:*" -> planar harmonic, "hydrogen:*" -> coulomb, "osc3d:*" ->
// spatial harmonic).  Raises ("InvalidQuantumNumbers") for other keys.
Potential potential_for(const FlowFields& flow);

// ---------------------------------------------------------------------------
// Wave function -> flow bundle

struct TransformConfig {
  // Points with |psi| <= node_tolerance_factor * peak are treated as nodes.
  double node_tolerance_factor = 1e-12;
  // Used only when the wave function carries no analytic gradient.
  FdConfig fd{1e-4, 4};
};

// rho = |psi|^2, v = (hbar/m) Im(grad psi / psi), u = (hbar/2m) grad rho/rho,
// j = rho v.  The drift and osmotic closures raise ("NodeEncountered") when
// evaluated where |psi| falls below the node threshold; rho, j, and grad_rho
// use the division-free forms and remain evaluable there.
FlowFields madelung_transform(const WaveFunction& psi,
                              const PhysicalConstants& consts = {},
                              const TransformConfig& cfg = {});

// ---------------------------------------------------------------------------
// Quantum force

struct BohmConfig {
  FdConfig inner{5e-3, 4};  // Laplacian of sqrt(rho)
  FdConfig outer{1e-2, 4};  // gradient of the Laplacian-to-value ratio
};

// (hbar^2/2m) grad( lap sqrt(rho) / sqrt(rho) ) by nested central
// differences on the density closure.  Raises ("StencilTouchesNode") if the
// density is nonpositive anywhere on the nested stencil.
Vec3 bohm_force_fd(const ScalarField& rho, const Vec3& p,
                   const PhysicalConstants& consts = {}, const BohmConfig& cfg = {});

// Analytic quantum-force closure when the bundle provides one, else the
// nested finite-difference route on the bundle's density.
Vec3 bohm_force(const FlowFields& flow, const Vec3& p, const BohmConfig& cfg = {});

// ---------------------------------------------------------------------------
// Residual reports

struct ResidualReport {
  std::string equation_tag;
  double max_abs_residual = 0.0;
  double l2_residual = 0.0;  // root mean square over the sampled points
  int sample_count = 0;
  double excluded_radius = 0.0;  // clearance kept around the singular set
  std::optional<std::vector<std::pair<Vec3, double>>> per_point;
};

struct ResidualOptions {
  FdConfig fd{1e-3, 4};
  BohmConfig bohm{};
  // Use the bundle's analytic derivative closures when present; switching
  // this off forces the finite-difference route everywhere (dual-route
  // comparison tests rely on that).
  bool prefer_analytic = true;
  bool collect_per_point = false;
  // Lattice points closer than this to the flow's singular set are skipped,
  // so no stencil reaches into the non-smooth neighbourhood.
  double min_singular_distance = 0.05;
};

struct MadelungReports {
  ResidualReport momentum;    // m (v.grad)v + grad V - quantum force
  ResidualReport continuity;  // div(rho v)      (stationary: d rho/dt = 0)
};

// Stationary momentum and continuity residuals over the grid lattice.
MadelungReports madelung_residual(const FlowFields& flow, const Potential& V,
                                  const GridSpec& grid,
                                  const ResidualOptions& opt = {});

// Pointwise |curl v| over the lattice (strong irrotationality check).
ResidualReport third_madelung_pointwise(const FlowFields& flow, const GridSpec& grid,
                                        const ResidualOptions& opt = {});

struct NelsonReports {
  ResidualReport momentum;  // m (v.grad)v + grad V - m (u.grad)u - (hbar/2) lap u
  ResidualReport osmotic;   // grad( v.u + (hbar/2m) div v )
};

// Stationary residuals of the stochastic-mechanics pair.
NelsonReports nelson_residual(const FlowFields& flow, const Potential& V,
                              const GridSpec& grid, const ResidualOptions& opt = {});

// ---------------------------------------------------------------------------
// Vorticity transport

// Velocity sampled in time; `singular` marks where spatial stencils must not
// reach (same convention as FlowFields).
struct TimeVectorField {
  std::function<Vec3(double, const Vec3&)> v;
  SingularSet singular = SingularSet::None;
};

// Constant-in-time wrapper around a stationary bundle's drift field.
TimeVectorField freeze_in_time(const FlowFields& flow);

struct VorticityOptions {
  FdConfig inner{1e-3, 4};  // curl of v (the vorticity itself)
  FdConfig outer{2e-2, 4};  // outer curl / jacobian of vorticity products
  double time_step = 1e-3;
  bool collect_per_point = false;
  double min_singular_distance = 0.05;
};

// Residual of d omega/dt = curl(v x omega) with omega = curl v, all
// derivatives by nested central differences.
ResidualReport vorticity_evolution_residual(const TimeVectorField& field, double t,
                                            const GridSpec& grid,
                                            const VorticityOptions& opt = {});

// Pointwise gap between the two equivalent transport right-hand sides,
// curl(v x omega)  vs  (omega.grad)v - (div v) omega - (v.grad)omega;
// vanishes for any smooth velocity field.
ResidualReport vorticity_formulation_gap(const TimeVectorField& field, double t,
                                         const GridSpec& grid,
                                         const VorticityOptions& opt = {});

// ---------------------------------------------------------------------------
// Smooth positive scalar fields and the log-derivative identity

// A strictly positive C^3 scalar field with closed-form derivative bundle:
// gradient, Hessian, and gradient-of-Laplacian.
struct SmoothScalarField {
  std::string tag = "field";
  std::function<double(const Vec3&)> value;
  std::function<Vec3(const Vec3&)> grad;
  std::function<Mat3(const Vec3&)> hess;
  std::function<Vec3(const Vec3&)> grad_lap;
};

// amplitude * exp(-beta |r - center|^2), beta > 0.
SmoothScalarField gaussian_scalar_field(double amplitude, double beta,
                                        const Vec3& center = Vec3::Zero());

// exp(k . r + offset); log-linear, so all log-derivative structure is constant.
SmoothScalarField exp_linear_scalar_field(const Vec3& k, double offset = 0.0);

struct TrigMode {
  double amplitude = 0.0;
  Vec3 wavevector = Vec3::Zero();
  double phase = 0.0;
};

// floor_level + sum_i a_i cos(k_i . r + phase_i); requires
// floor_level > sum |a_i| so the field stays strictly positive.
SmoothScalarField trig_scalar_field(double floor_level,
                                    const std::vector<TrigMode>& modes);

struct NottaleOptions {
  FdConfig inner{1e-2, 4};  // Laplacian of phi^alpha
  FdConfig outer{2e-2, 4};  // gradient of the Laplacian-to-value ratio
  bool collect_per_point = false;
};

// Residual of the log-derivative identity
//   (1/alpha) grad( lap(phi^alpha) / phi^alpha )
//     = lap(grad ln phi) + 2 alpha ((grad ln phi).grad)(grad ln phi).
// The left side is evaluated by nested finite differences on phi^alpha; the
// right side analytically from the field's derivative bundle, keeping the
// two sides independent.
ResidualReport nottale_identity_check(const SmoothScalarField& phi, double alpha,
                                      const GridSpec& grid,
                                      const NottaleOptions& opt = {});

// Residual of (w.grad)w - grad(w^2/2), which vanishes exactly for gradient
// (irrotational) fields; rotational fields expose the gap.
ResidualReport weber_identity_check(const VectorField& w, const GridSpec& grid,
                                    const ResidualOptions& opt = {});

// ---------------------------------------------------------------------------
// Generalized irrotationality (distributional pairing)

struct PairingResidual {
  std::string test_label;
  double lhs = 0.0;       // <curl j, phi> = integral of j . curl(phi)
  double rhs = 0.0;       // integral of 2 (grad sqrt(rho) x lambda) . phi
  double residual = 0.0;  // |lhs - rhs|
};

struct AntonelliConfig {
  QuadratureConfig quad{1e-9, 1e-7, 4000};
  // Cylinder clearance kept around an axis/origin singular set while
  // integrating; scan this down to confirm stability of the pairing.
  double exclusion_radius = 1e-8;
  // |psi| <= factor * peak counts as a node when forming the polar factor.
  double node_tolerance_factor = 1e-13;
};

// For each vector test function, pairs curl j (by parts) and the polar-
// decomposition right-hand side 2 (grad sqrt(rho)) x lambda, where
// lambda = (hbar/m) Im(conj(psi/|psi|) grad psi) = sqrt(rho) v.  Planar wave
// functions pair per unit transverse length against the test's z-component.
// Raises ("NodeEncountered") if a quadrature sample lands on a node.
std::vector<PairingResidual> antonelli_irrotationality_residual(
    const WaveFunction& psi, const std::vector<VectorTestFunction>& tests,
    const PhysicalConstants& consts = {}, const AntonelliConfig& cfg = {});

}  // namespace qhydro
