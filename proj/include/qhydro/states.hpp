// Closed-form quantum states and their hydrodynamic field bundles.
//
// Families: the 2-D isotropic oscillator (integer and non-integer angular
// parameter, the latter in both confluent-hypergeometric branches), bound
// hydrogen orbitals, the two-eigenfunction hydrogen superposition used for
// winding-number experiments, and the 3-D oscillator ground state expressed
// through its osmotic velocity.  Densities, drifts, currents, and the
// higher-derivative bundles consumed by equation-residual evaluators are all
// closed-form (order-3 radial jets), and normalization constants are always
// computed by quadrature at construction.
#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qhydro/constants.hpp"
#include "qhydro/numerics/grid.hpp"
#include "qhydro/numerics/jet.hpp"

namespace qhydro {

using Vec3c = Eigen::Vector3cd;

struct QuantumLabels {
  std::string family;   // oscillator2d_standard | oscillator2d_U | oscillator2d_L |
                        // hydrogen | phi_a_superposition | oscillator3d_ground
  int n = 0;            // principal / radial index
  int l = 0;            // orbital index (hydrogen)
  double mu = 0.0;      // angular parameter (integer for quantized families)
  double a_param = 0.0; // first Tricomi parameter (U branch)
  double a_mix = 0.0;   // superposition mixing parameter, in [-1, 1]
  double energy = 0.0;
};

struct DomainInfo {
  int dimension = 2;
  SingularSet singular = SingularSet::None;
  bool has_phase_cut = false;  // discontinuity across the positive x half-plane
};

struct WaveFunction {
  QuantumLabels labels;
  DomainInfo domain;
  std::function<std::complex<double>(const Vec3&)> evaluate;
  std::function<Vec3c(const Vec3&)> gradient;  // analytic; may be empty
  double normalization = 1.0;                  // the 1/sqrt(A) factor
  double peak_abs = 1.0;                       // coarse max of |psi|, for node thresholds
};

// Hydrodynamic bundle.  rho, v, u, j are always present; the remaining
// closures are the analytic higher-derivative fields used by strong-form
// residual evaluators and may be empty for families that do not need them.
struct FlowFields {
  int dimension = 2;
  SingularSet singular = SingularSet::None;
  bool stationary = true;
  double mu = 0.0;  // circulation parameter of the azimuthal drift (0 if none)
  PhysicalConstants consts{};
  std::string family_key;
  double rho_peak = 1.0;

  std::function<double(const Vec3&)> rho;
  std::function<Vec3(const Vec3&)> v;
  std::function<Vec3(const Vec3&)> u;
  std::function<Vec3(const Vec3&)> j;

  std::function<Vec3(const Vec3&)> grad_rho;
  std::function<Mat3(const Vec3&)> jac_v;
  std::function<Vec3(const Vec3&)> conv_v;  // (v . grad) v
  std::function<Vec3(const Vec3&)> conv_u;  // (u . grad) u
  std::function<Vec3(const Vec3&)> lap_u;   // componentwise Laplacian of u
  std::function<Vec3(const Vec3&)> bohm;    // (hbar^2/2m) grad(lap sqrt(rho)/sqrt(rho))

  double div_v(const Vec3& p) const { return jac_v ? jac_v(p).trace() : 0.0; }
};

struct StatePair {
  WaveFunction psi;
  FlowFields flow;
  bool has_flow = true;
};

enum class RadialCase { U, L };

// 2-D oscillator eigenstates with integer angular momentum.
StatePair oscillator2d_standard(int n, int mu, const PhysicalConstants& consts = {});

// 2-D oscillator states with non-integer angular parameter:
// case U: R(s) = s^mu U(a, mu+1; k s^2) e^{-k s^2/2}, E = hbar w (-2a+mu+1),
//         mu in (-1,0) u (0,1), a not a nonpositive integer;
// case L: R(s) = s^mu L_n^mu(k s^2) e^{-k s^2/2}, E = hbar w (2n+mu+1),
//         mu in (-1,inf) non-integer;  here k = m w / hbar.
// `phase_sign` (+1/-1) selects the branch of the azimuthal phase/drift.
StatePair oscillator2d_nonquantized(RadialCase c, int n, double a_param, double mu,
                                    int phase_sign = +1,
                                    const PhysicalConstants& consts = {});

// Bound hydrogen orbital (n, l, mu), Coulomb potential families.
StatePair hydrogen_state(int n, int l, int mu, const PhysicalConstants& consts = {});

// Normalized superposition Phi_a = C(a) h_{n,1}(r) (y - i a x)/r of the two
// hydrogen (n, 1, +-1) orbitals; reduces to them at a = +-1 and is real at
// a = 0.  Only the wave function is defined (no stationary flow bundle).
WaveFunction phi_a_superposition(int n, double a_mix,
                                 const PhysicalConstants& consts = {});

// 3-D oscillator ground state as a flow: u = -w r, v = 0, Gaussian density.
FlowFields oscillator3d_ground_nelson(const PhysicalConstants& consts = {});
// Its wave function (real Gaussian), for transforms and overlaps.
WaveFunction oscillator3d_ground_wavefunction(const PhysicalConstants& consts = {});

// Radial profile R(s) of a 2-D oscillator family as an order-3 jet in s.
// Deliberately ungated: parameter regimes outside the normalizable ranges are
// exactly what the divergence probes must be able to sample.
std::function<Jet3(double)> radial_profile(RadialCase c, int n, double a_param,
                                           double mu,
                                           const PhysicalConstants& consts = {});

enum class ConvergenceVerdict { Convergent, Divergent };

struct IntegrabilityReport {
  ConvergenceVerdict verdict = ConvergenceVerdict::Convergent;
  std::vector<double> cutoffs;
  std::vector<double> integrals;   // int_{1/c}^{c} R^2 s ds per cutoff
  std::vector<double> increments;  // successive differences
};

// Scans int_{1/c}^{c} |R|^2 s ds over a growing cutoff sequence; Convergent
// when the increments decay geometrically, Divergent when they fail to.
IntegrabilityReport radial_integrability_probe(RadialCase c, int n, double a_param,
                                               double mu,
                                               const std::vector<double>& cutoffs = {},
                                               const PhysicalConstants& consts = {});

// Parse a family key like "osc2d:standard:n=0:mu=1", "osc2d:L:n=0:mu=0.5",
// "osc2d:U:a=0.7:mu=0.5", "hydrogen:n=2:l=1:mu=1", "phi_a:n=2:a=0.5",
// "osc3d:ground".  Raises ("InvalidQuantumNumbers") on malformed keys.
StatePair state_from_key(const std::string& key, const PhysicalConstants& consts = {});

}  // namespace qhydro
