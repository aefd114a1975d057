// Dimensional constants consumed by every formula in the library.
//
// Two presets are provided: natural units (hbar = mass = omega = 1 and a
// Gaussian electromagnetic normalization that makes the Bohr radius equal
// to 1) and SI values for the electron.  All module code takes an explicit
// PhysicalConstants argument, so unit conventions never hide in formulas.
#pragma once

namespace qhydro {

inline constexpr double kPi = 3.14159265358979323846264338327950288;

struct PhysicalConstants {
  double hbar = 1.0;      // reduced Planck constant  [action]
  double mass = 1.0;      // particle mass            [mass]
  double omega = 1.0;     // trap angular frequency   [1/time]
  double eps0 = 1.0 / (4.0 * kPi);  // vacuum permittivity
  double e_charge = 1.0;  // elementary charge

  // a0 = 4 pi eps0 hbar^2 / (m e^2); equals 1 in the natural preset.
  double bohr_radius() const {
    return 4.0 * kPi * eps0 * hbar * hbar / (mass * e_charge * e_charge);
  }

  // Coulomb coupling e^2 / (4 pi eps0); the attractive central potential is
  // V(r) = -coulomb_strength() / r.
  double coulomb_strength() const {
    return e_charge * e_charge / (4.0 * kPi * eps0);
  }

  static PhysicalConstants natural() { return PhysicalConstants{}; }

  static PhysicalConstants si() {
    PhysicalConstants c;
    c.hbar = 1.054571817e-34;      // J s
    c.mass = 9.1093837015e-31;     // kg (electron)
    c.omega = 1.0;                 // reference frequency, caller-adjustable
    c.eps0 = 8.8541878128e-12;     // F/m
    c.e_charge = 1.602176634e-19;  // C
    return c;
  }
};

}  // namespace qhydro
