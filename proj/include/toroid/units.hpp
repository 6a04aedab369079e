#pragma once

// Internal unit system: length nm, time ps, energy meV, charge in units of e.
// Derived: electric field mV/nm, vector potential mV*ps/nm (so that e*A is a
// momentum in meV*ps/nm), current density e/(nm^2 ps).

#include <numbers>

namespace toroid::units {

inline constexpr double pi = std::numbers::pi;

inline constexpr double hbar = 0.6582119569;          // meV ps
inline constexpr double hbar2_over_2me = 38.0998212;  // meV nm^2, free electron
inline constexpr double default_effective_mass = 0.067;
inline constexpr double speed_of_light = 299792.458;  // nm/ps
inline constexpr double boltzmann = 0.08617333262;    // meV/K

// Conduction electrons carry charge -e.
inline constexpr double carrier_charge = -1.0;

// mu0/(4 pi) expressed so that A [mV ps/nm] = mu0_over_4pi * sum(j dV / |r - r'|)
// with j dV in e*nm/ps and distances in nm. Equals e^2/(4 pi eps0 c^2).
inline constexpr double mu0_over_4pi = 1.602176634e-8;

inline constexpr double volt_per_cm = 1.0e-4;  // in mV/nm
inline constexpr double micrometre = 1.0e3;    // in nm

inline constexpr double hbar2_over_2m(double effective_mass_ratio) {
  return hbar2_over_2me / effective_mass_ratio;
}

}  // namespace toroid::units
