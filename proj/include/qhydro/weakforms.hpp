// Space-time variational residual evaluators for quantum hydrodynamics.
//
// Three weak formulations are implemented, each pairing closed-form flow
// fields against smooth compactly supported test functions on [0,inf) x R^d:
//
//  * gm_weak_residual     — the density/current (Gasser–Markowich style)
//    system: a momentum equation tested against vector fields and a
//    continuity equation tested against scalar fields, both including the
//    initial-data boundary terms at t = 0.
//  * nelson_weak_residual — the drift/osmotic velocity (Nelson style)
//    system: two vector-tested equations in u and v, guarded by a local
//    square-integrability probe near declared singular sets.
//  * osmotic_bvp_check    — the time-independent recovery of the osmotic
//    velocity from a candidate density: u must pair against divergences of
//    test fields like (hbar/2m) grad(log rho), with a unit-norm gate.
//
// A fourth helper, delta_potential_term, evaluates the contact-interaction
// replacement of the potential pairing (a point potential alpha delta^d
// contributes alpha * integral over t of (div phi)(t, 0)); its output is
// added by the caller to the drift residual computed with V = 0.
//
// Test functions are finite sums of separable components
// h(t) * s(x) * direction, which lets every space-time integral factor into
// calibrated one-dimensional graded Gauss–Legendre rules (see weakforms.cpp
// for the calibration numbers).  Per-test evaluations are independent and
// may safely run concurrently.
#pragma once

#include <functional>
#include <string>
#include <vector>

#include "qhydro/constants.hpp"
#include "qhydro/numerics/grid.hpp"
#include "qhydro/numerics/test_function.hpp"
#include "qhydro/states.hpp"

namespace qhydro {

// ---------------------------------------------------------------------------
// Test functions
// ---------------------------------------------------------------------------

// Smooth compactly supported time factor h on [t_lo, t_hi] (a subinterval of
// [0, 3]); value/derivative must vanish identically outside the support.
// Profiles whose support starts at t_lo = 0 have h(0) != 0 and activate the
// initial-data terms of the weak forms.
struct TimeProfile {
  double t_lo = 0.0;
  double t_hi = 1.0;
  std::function<double(double)> value;
  std::function<double(double)> derivative;
};

// h(t) = B(t / width) on [0, width] where B is the standard mollifier bump;
// h(0) = 1 and h'(0) = 0, so tests built on it exercise the initial terms.
TimeProfile origin_time_profile(double width);

// h(t) = B((t - center) / halfwidth) supported inside (0, 3); requires
// center - halfwidth >= 0.  Tests built on it never see the initial data.
TimeProfile interior_time_profile(double center, double halfwidth);

// One separable space-time component  coef * h(t) * s(x) * direction, where
// s(x) is a product of one-dimensional bumps over the active coordinates.
// The scalar view of a test drops the direction; the vector view keeps it.
struct SeparableComponent {
  double coef = 1.0;
  TimeProfile time;
  Vec3 direction = Vec3::UnitX();  // vector-view direction (z = 0 when 2-D)
  Box3 box;                        // spatial support
  std::function<double(const Vec3&)> value;      // s
  std::function<Vec3(const Vec3&)> gradient;     // grad s
  std::function<double(const Vec3&)> laplacian;  // lap s
  std::function<Mat3(const Vec3&)> hessian;      // grad grad s
};

// A test function, usable both as the scalar field xi = sum coef h s and as
// the vector field phi = sum coef h s direction.  All derivative closures
// are analytic; `scalar_*` and `vector_*` evaluators below exist so tests
// can verify them against finite differences.
struct SpaceTimeTest {
  std::string tag;
  int dimension = 3;
  std::vector<SeparableComponent> components;

  double scalar(double t, const Vec3& x) const;
  double scalar_dt(double t, const Vec3& x) const;
  Vec3 scalar_gradient(double t, const Vec3& x) const;
  double scalar_laplacian(double t, const Vec3& x) const;

  Vec3 vector_value(double t, const Vec3& x) const;
  Vec3 vector_dt(double t, const Vec3& x) const;
  double divergence(double t, const Vec3& x) const;
  Vec3 vector_laplacian(double t, const Vec3& x) const;
  Vec3 grad_divergence(double t, const Vec3& x) const;
};

// Single-component separable test: spatial bump product centred at `center`
// with per-axis halfwidths, the given time profile, and vector direction.
// For dimension 2 the third spatial factor is identically 1, the box is the
// z = 0 slab, and the direction must have zero z component.
SpaceTimeTest make_space_time_test(const std::string& tag, const Vec3& center,
                                   const Vec3& halfwidth, const TimeProfile& time,
                                   const Vec3& direction, int dimension = 3);

// a * A + b * B as a test function (components concatenated with scaled
// coefficients); residual maps are linear, so residual(combine) must equal
// the combination of residuals.
SpaceTimeTest combine_tests(double a, const SpaceTimeTest& A, double b,
                            const SpaceTimeTest& B);

// ---------------------------------------------------------------------------
// Field bundles
// ---------------------------------------------------------------------------

// Density/current data for the weak system: time-sampled fields plus the
// initial data entering the t = 0 boundary terms.  `stationary = true`
// promises rho/grad_rho/current are t-independent, enabling the factored
// quadrature path (the general path integrates the full tensor product).
struct GMFields {
  int dimension = 3;
  bool stationary = false;
  std::function<double(double, const Vec3&)> rho;
  std::function<Vec3(double, const Vec3&)> grad_rho;
  std::function<Vec3(double, const Vec3&)> current;  // j
  std::function<double(const Vec3&)> rho0;
  std::function<Vec3(const Vec3&)> j0;
};

// Drift/osmotic velocity data for the Nelson-style weak system.  `singular`
// declares where u or v may blow up; every test support is probed for local
// square integrability near that set before any residual is evaluated.
struct NelsonFields {
  int dimension = 3;
  bool stationary = false;
  SingularSet singular = SingularSet::None;
  std::function<Vec3(double, const Vec3&)> u;
  std::function<Vec3(double, const Vec3&)> v;
  std::function<Vec3(const Vec3&)> u0;
  std::function<Vec3(const Vec3&)> v0;
};

// Potential entering the momentum/drift equations, with analytic gradient.
struct PotentialField {
  std::function<double(const Vec3&)> value;
  std::function<Vec3(const Vec3&)> gradient;

  static PotentialField constant(double c);
  // V = (1/2) m omega^2 r^2 (r taken over all three coordinates; harmless
  // for planar fields because their tests live in the z = 0 slab).
  static PotentialField harmonic(const PhysicalConstants& consts);
  // V = -strength / r.
  static PotentialField coulomb(double strength);
};

// Stationary closed-form flows provide both the running fields and the
// initial data.
GMFields gm_fields_from_flow(const FlowFields& flow);
NelsonFields nelson_fields_from_flow(const FlowFields& flow);

// ---------------------------------------------------------------------------
// Residual evaluation
// ---------------------------------------------------------------------------

struct GMResidual {
  std::string test_tag;
  double momentum = 0.0;    // vector-tested equation, incl. initial term
  double continuity = 0.0;  // scalar-tested equation, incl. initial term
};

struct NelsonResidual {
  std::string test_tag;
  double drift = 0.0;    // equation propagating v, incl. initial term
  double osmotic = 0.0;  // equation propagating u, incl. initial term
};

struct OsmoticResidual {
  std::string test_tag;
  double value = 0.0;  // integral of u . phi + (hbar/2m) log(rho) div phi
};

struct OsmoticReport {
  std::vector<OsmoticResidual> residuals;
  double norm_deviation = 0.0;  // | integral of rho - 1 |
};

// Momentum residual
//   int dt int dx [ j . dphi/dt + (j (x) j / rho) : grad phi - rho grad V . phi
//                   + (hbar^2/4m)(grad rho . lap phi
//                                 + (grad rho (x) grad rho / rho) : grad phi) ]
//   + int dx j0 . phi(0, .)
// and continuity residual
//   int dt int dx [ rho dxi/dt + j . grad xi ] + int dx rho0 xi(0, .)
// per test ((a (x) a) : grad b means sum_ik a_i a_k d_k b_i).  Both vanish
// for every admissible test exactly when the fields solve the system with
// the given initial data.  The density must stay strictly positive on each
// test support (probed on the quadrature grid and a uniform lattice);
// an exact zero raises DensityVanishesOnSupport.
std::vector<GMResidual> gm_weak_residual(const GMFields& fields,
                                         const PotentialField& V,
                                         const std::vector<SpaceTimeTest>& tests,
                                         const PhysicalConstants& consts = {});

// Drift residual
//   int dt int dx [ m v . dphi/dt + (m|v|^2/2 + V - m|u|^2/2) div phi
//                   + (hbar/2) u . lap phi ] + int dx m v0 . phi(0, .)
// and osmotic residual
//   int dt int dx [ u . dxi/dt + (u . v) div xi
//                   - (hbar/2m) v . grad(div xi) ] + int dx u0 . xi(0, .)
// per test (both tested against the vector view).  Before integrating, each
// test support is probed for local square integrability of u and v next to
// `fields.singular`: the probe integral of |u|^2 + |v|^2 is formed with a
// shrinking cylindrical exclusion, and growth by more than a factor of two
// as the exclusion radius falls two decades raises LocalL2ProbeFailed.
// To wire a contact interaction at the origin, evaluate with V = 0 and add
// delta_potential_term values to the drift residuals.
std::vector<NelsonResidual> nelson_weak_residual(
    const NelsonFields& fields, const PotentialField& V,
    const std::vector<SpaceTimeTest>& tests, const PhysicalConstants& consts = {});

// Pairing residual  int dx [ u . phi + (hbar/2m) log(rho) div phi ]  per
// test, plus the unit-norm deviation | integral of rho - 1 |.  The density
// must be normalizable and normalized: a non-convergent integral, a value
// off unity by more than 1e-7, or a non-positive density sample on a test
// support raises NonNormalizable.
OsmoticReport osmotic_bvp_check(const std::function<Vec3(const Vec3&)>& u,
                                const std::function<double(const Vec3&)>& rho,
                                const std::vector<VectorTestFunction>& tests,
                                int dimension = 3,
                                const PhysicalConstants& consts = {});

// Contact-interaction pairing  alpha * int dt (div phi)(t, 0)  per test.
// Tests must be smooth at the spatial origin (bump products are).
std::vector<double> delta_potential_term(double alpha,
                                         const std::vector<SpaceTimeTest>& tests);

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

// JSON object keyed by test_tag; values carry the named residual fields.
std::string battery_json(const std::vector<GMResidual>& battery);
std::string battery_json(const std::vector<NelsonResidual>& battery);
std::string battery_json(const OsmoticReport& report);

}  // namespace qhydro
