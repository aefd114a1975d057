// Real-parameter special functions used by the closed-form solution families:
// Gamma, confluent hypergeometric 1F1 and U, generalized Laguerre, associated
// Legendre, and orthonormal spherical harmonics.  Order-3 jet variants
// propagate analytic derivatives through the classical derivative identities,
// so downstream differential-equation residuals carry no stencil error.
#pragma once

#include <complex>

#include "qhydro/numerics/jet.hpp"

namespace qhydro {

// Gamma function; raises ("PoleAtNonpositiveInteger") at its poles.
double gamma_fn(double x);

// 1/Gamma(x); returns exactly 0 at nonpositive integers.
double reciprocal_gamma(double x);

// Kummer's confluent hypergeometric 1F1(a, b; x) by stable series summation.
// Raises ("ParameterPole") when b is a nonpositive integer and
// ("Overflow") when the sum leaves double range.
double kummer_1f1(double a, double b, double x);

// Diagnostics for the Tricomi function evaluation.
struct UResult {
  double value = 0.0;
  // The small-x connection formula subtracts two Kummer branches; when the
  // result is smaller than 1e-6 times the branch magnitudes this flag is
  // set.  Below a ratio of 1e-7 the value is recomputed through the
  // cancellation-free integral route whenever one applies (a > -1), so a
  // flagged value is still accurate in that range; the ratio always reports
  // the connection-formula diagnostic.
  bool cancellation_flagged = false;
  double cancellation_ratio = 1.0;  // |sum| / (|branch1| + |branch2|)
};

// Tricomi's confluent hypergeometric U(a, b; x) for x > 0 and non-integer b.
// Below kTricomiAsymptoticSwitch the two-branch connection formula is used;
// above it, the divergent asymptotic series truncated at its smallest term
// (both routes agree to ~1e-5 in the crossover window, which is tested).
// When the asymptotic series bottoms out above 1e-6 relative (large a just
// past the switch), the evaluation falls back to the integral route below,
// via one downward recurrence step in a when a <= 0.  Raises ("IntegerB")
// for integer b and ("TruncationTooSmall") only when no route applies
// (a <= -1 in the stalled regime).
UResult tricomi_u_detail(double a, double b, double x);
double tricomi_u(double a, double b, double x);

// Independent evaluation of U(a, b; x) through the exponentially weighted
// integral representation, valid for a > 0, x > 0 (positive integrand, no
// cancellation).  Serves as the cross-check route and the large-x fallback.
// Raises ("OutOfRegime") for a <= 0 and ("NoConvergence") on quadrature
// budget exhaustion.
double tricomi_u_integral_route(double a, double b, double x);

inline constexpr double kTricomiAsymptoticSwitch = 20.0;

// Generalized Laguerre polynomial L_n^mu(x) by three-term recurrence, with
// L_0 = 1 and L_1 = 1 + mu - x.  The recurrence is valid for any real mu;
// the classical weight/orthogonality interpretation needs mu > -1, and
// callers that require integrability enforce their own parameter gates.
double laguerre(int n, double mu, double x);

// Associated Legendre P_l^m(t) with Condon-Shortley phase, |m| <= l,
// t in [-1, 1].  Negative m via the standard ratio of factorials.
double legendre_assoc(int l, int m, double t);

// Orthonormal spherical harmonic Y_l^m(theta, phi) with Condon-Shortley
// phase, so Y_l^{-m} = (-1)^m conj(Y_l^m).
std::complex<double> spherical_harmonic(int l, int m, double theta, double phi);

// Order-3 jets in the function argument (composed with the incoming jet).
Jet3 laguerre_jet(int n, double mu, const Jet3& x);
Jet3 kummer_1f1_jet(double a, double b, const Jet3& x);
Jet3 tricomi_u_jet(double a, double b, const Jet3& x);

// Jet of P_l^m in t; needs |t| < 1 when l >= 1 (the derivative formulas
// divide by 1 - t^2).  l = 0 returns the constant jet.
Jet3 legendre_assoc_jet(int l, int m, const Jet3& t);

}  // namespace qhydro
