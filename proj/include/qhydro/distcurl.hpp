// Distributional curl machinery: test-function pairings for vorticity that
// lives on measure-zero sets, delta-coefficient extraction by mollifier
// limits, irrotationality verdicts, the density-paired curl expectation, and
// the branch-cut boundary defect that decides weak differentiability.
//
// Every "evaluation at a point of a distribution" here is realized as an
// extrapolated mollifier limit, and every pairing carries an excluded-radius
// scan demonstrating insensitivity to the cutoff around the singular set.
#pragma once

#include <array>
#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "qhydro/constants.hpp"
#include "qhydro/errors.hpp"
#include "qhydro/numerics/finite_diff.hpp"
#include "qhydro/numerics/grid.hpp"
#include "qhydro/numerics/quadrature.hpp"
#include "qhydro/numerics/test_function.hpp"
#include "qhydro/states.hpp"

namespace qhydro {

struct PairingConfig {
  QuadratureConfig quad{1e-9, 1e-7, 3000};
  // Radii excluded around the singular set, largest first; the pairing is
  // accepted when the increments between successive radii decay.
  std::vector<double> eps_ladder{1e-3, 1e-4, 1e-5};
  // Geometric decay required of successive scan increments.
  double increment_decay = 0.3;
  SingularSet singular = SingularSet::None;
};

// A pairing value with its excluded-radius scan.  `quadrature_error` adds the
// scan's extrapolated tail to the quadrature estimate, so the scan spread of
// an accepted result is bounded by a small multiple of it.
struct PairingResult {
  bool is_vector = false;
  double value = 0.0;           // scalar pairings (2-D)
  Vec3 vector_value = Vec3::Zero();  // vector pairings (3-D)
  double quadrature_error = 0.0;
  struct ScanEntry {
    double eps_sing = 0.0;
    double value = 0.0;
    Vec3 vector_value = Vec3::Zero();
  };
  std::vector<ScanEntry> epsilon_scan;
  std::string test_tag;
};

// Pairing of the scalar curl of a planar field with a test function:
//   value = -integral( v_y dphi/dx - v_x dphi/dy ).
// Raises ("EpsilonScanDiverged") when the excluded-radius scan keeps
// changing, i.e. the pairing fails its local-integrability precondition.
PairingResult dist_curl_2d(const VectorField& v, const TestFunction& phi,
                           const PairingConfig& cfg = {});

// Componentwise pairing of the curl of a 3-D field with a vector test
// function given by its scalar components:
//   value_i = integral( (v x grad phi_i)_i ).
PairingResult dist_curl_3d(const VectorField& v,
                           const std::array<TestFunction, 3>& components,
                           const PairingConfig& cfg = {});

// Extrapolated mollifier limit of the pairing: the coefficient of the point
// delta carried by the field's distributional curl.  The mollifier family
// maps a width to a test function with value 1 at the delta's location.
struct DeltaCoefficient {
  double coefficient = 0.0;
  double extrapolation_error = 0.0;
  std::vector<std::pair<double, double>> table;  // (width, pairing value)
};
DeltaCoefficient delta_coefficient_extract(
    const VectorField& v,
    const std::function<TestFunction(double)>& mollifier_family,
    const std::vector<double>& widths = {0.8, 0.4, 0.2, 0.1},
    const PairingConfig& cfg = {});

enum class IrrotationalityVerdict { Irrotational, QuasiIrrotational };

struct IrrotationalityReport {
  IrrotationalityVerdict verdict = IrrotationalityVerdict::Irrotational;
  std::string support_tag;  // "point", "line", or "none"
  double max_off_support = 0.0;
  double max_on_support = 0.0;
  double tolerance = 0.0;
};

// Classifies a velocity field by its curl pairings: Irrotational when every
// pairing vanishes within tol, QuasiIrrotational when pairings vanish for
// all test functions supported away from the candidate singular set while at
// least one mollifier straddling it exceeds 100 x tol.  Anything in between
// raises ("Inconclusive").
IrrotationalityReport quasi_irrotationality_report(
    const VectorField& v, int dimension, SingularSet singular,
    const std::vector<TestFunction>& off_support,
    const std::vector<TestFunction>& on_support, double tol = 1e-7,
    const PairingConfig& cfg = {});

// Curl paired with the flow's own density (the canonical extension of the
// curl functional to integrable, decaying arguments).  The density must pass
// a ray-scan decay probe; otherwise ("ExtensionHypothesisViolated") is
// raised.  Returns a vector pairing in 3-D and a scalar one in 2-D.
PairingResult curl_expectation(const FlowFields& flow,
                               const PairingConfig& cfg = {});

// Branch-cut families on the slit plane: the azimuthal factor of the wave
// function is exp(i mu phi), cos(mu phi), or sin(mu phi).
enum class CutVariant { Exp, Cos, Sin };

// The boundary term obstructing weak differentiability across the cut:
//   defect = factor(variant, mu) * integral_0^inf R(x) xi(x, 0) dx
// with factor exp(2 pi i mu) - 1, cos(2 pi mu) - 1, or sin(2 pi mu), R the
// radial profile selected by the labels, and xi a fixed reference test
// function bump(x - 2) * bump(y).  The weak derivative exists iff the factor
// vanishes.
struct DefectResult {
  std::complex<double> factor;
  double line_integral = 0.0;
  std::complex<double> defect;
  double quadrature_error = 0.0;
  std::string variant_tag;
};
DefectResult weak_derivative_defect(CutVariant variant, RadialCase c, int n,
                                    double a_param, double mu,
                                    const PhysicalConstants& consts = {},
                                    const QuadratureConfig& quad = {});

}  // namespace qhydro
