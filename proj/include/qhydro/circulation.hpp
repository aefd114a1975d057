// Circulation integrals along closed curves, winding numbers by adaptive
// phase unwrapping, the mixing-parameter scan that reproduces the sign-jump
// figure, and quantization sweeps over whole state families.
//
// The normalized circulation (m / 2 pi hbar) * contour integral of v . dr
// equals the drift field's angular parameter on any admissible loop around
// the singular axis; winding numbers count accumulated phase of the wave
// function itself.  Both are checked against each other by the tests.
#pragma once

#include <functional>
#include <string>
#include <vector>

#include "qhydro/constants.hpp"
#include "qhydro/errors.hpp"
#include "qhydro/numerics/finite_diff.hpp"
#include "qhydro/numerics/grid.hpp"
#include "qhydro/numerics/quadrature.hpp"
#include "qhydro/states.hpp"

namespace qhydro {

// C^1 parametrized curve with an analytic tangent closure.
struct CurveSpec {
  std::function<Vec3(double)> parametrization;
  std::function<Vec3(double)> derivative;
  double t0 = 0.0;
  double t1 = 1.0;
  bool closed = true;
  int samples = 256;  // initial sampling density; must be >= 64
};

// Counterclockwise circle of the given in-plane radius at height z.
CurveSpec circle_xy(double radius, double z = 0.0, int samples = 256);

// Same image, opposite orientation.
CurveSpec reverse_curve(const CurveSpec& curve);

// Restriction to [a, b] (not closed); for concatenation checks.
CurveSpec subcurve(const CurveSpec& curve, double a, double b);

// Enforces the curve contract: samples >= 64, closed curves return to their
// start within 1e-12 of the curve scale, and the tangent closure matches a
// finite difference of the parametrization to 1e-6.
void validate_curve(const CurveSpec& curve);

struct CirculationConfig {
  QuadratureConfig quad{1e-12, 1e-10, 2000};
  // Pre-check clearance: curve samples closer than this to the field's
  // singular set abort the integral.
  double eps_sing = 1e-6;
};

// Contour integral of v . dr along the curve (no normalization, curve need
// not be closed).  Raises ("CurveHitsSingularSet") if a sample of the curve
// comes within eps_sing of the singular set.
double line_integral(const VectorField& v, const CurveSpec& curve,
                     SingularSet singular = SingularSet::None,
                     const CirculationConfig& cfg = {});

// (m / 2 pi hbar) * closed contour integral of v . dr.
double circulation(const VectorField& v, const CurveSpec& curve,
                   const PhysicalConstants& consts = {},
                   SingularSet singular = SingularSet::None,
                   const CirculationConfig& cfg = {});

struct WindingConfig {
  // Points with |psi| <= factor * (peak |psi| on the curve) count as nodes.
  double node_tolerance_factor = 1e-12;
  // Sampling is doubled until every per-step phase increment is below
  // max_step_phase; exceeding max_samples raises ("NonConvergent").
  int max_samples = 1 << 16;
  double max_step_phase = 0.5 * kPi;
};

// Accumulated phase of psi along the closed curve divided by 2 pi, by
// adaptive unwrapping of per-step increments.  Raises ("NodeOnCurve") when
// the curve meets a node of psi and ("NonConvergent") when a phase jump does
// not refine away (e.g. a branch discontinuity crossing the curve).
int winding_number(const WaveFunction& psi, const CurveSpec& curve,
                   const WindingConfig& cfg = {});

// One row of the mixing-parameter scan.
enum class ScanStatus { Ok, Undefined, Error };

struct ScanRow {
  double a = 0.0;
  double value = 0.0;  // meaningful only when status == Ok
  ScanStatus status = ScanStatus::Ok;
  std::string note;
};

// Normalized circulation of the two-eigenfunction superposition's drift
// around the radius-r0 equatorial circle, for each mixing parameter in
// a_grid.  Rows where the superposition has a node on the circle (the a = 0
// case) carry the Undefined marker; failures carry Error with the code in
// `note` instead of aborting the scan.
std::vector<ScanRow> circulation_scan_phi_a(int n, double r0,
                                            const std::vector<double>& a_grid,
                                            const PhysicalConstants& consts = {});

struct SweepEntry {
  std::string family_key;
  double radius = 0.0;
  double z_offset = 0.0;
  double value = 0.0;
  bool quantized = true;  // integer angular parameter
  double deviation_from_integer = 0.0;
};

struct SweepReport {
  std::vector<SweepEntry> entries;
  // Maximum over entries of quantized families only.
  double max_deviation = 0.0;
};

// Circulation of every supplied state over circles of the given radii.  For
// each state and radius the circle height is chosen among a few candidates
// to keep the curve clear of nodes.  Quantized families contribute to
// max_deviation; non-quantized families report their non-integer values.
SweepReport quantization_sweep(const std::vector<StatePair>& states,
                               const std::vector<double>& radii,
                               const PhysicalConstants& consts = {});

}  // namespace qhydro
