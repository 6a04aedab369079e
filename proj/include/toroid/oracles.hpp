#pragma once

// Closed-form references for tests: thin-torus static potentials, the low-
// frequency radiation pattern and particle-on-a-ring levels. Pure formulas,
// no quadrature, so tests compare two independent code paths.

#include <cmath>
#include <stdexcept>

#include "toroid/units.hpp"

namespace toroid::oracles {

// Thin torus carrying a poloidal surface current K = I / (2 pi rho), I being the
// total current through a circle around the z axis on the surface.
struct AnalyticThinTorus {
  double major_radius = 150.0;  // R [nm]
  double minor_radius = 15.0;   // r0 [nm]
  double current = 1.0;         // I [e/ps]

  double volume() const { return 2.0 * units::pi * units::pi * minor_radius * minor_radius * major_radius; }
  void validate() const {
    if (!(major_radius > 0.0 && minor_radius > 0.0 && major_radius > minor_radius))
      throw std::invalid_argument("thin torus: need R > r0 > 0");
  }
};

struct SphericalPotential {
  double a_r = 0.0, a_theta = 0.0;
};

// Far field, r >= 5R: A_r = -mu0/4pi VI/(2 pi r^3) cos(theta), A_theta = -mu0/4pi VI/(4 pi r^3) sin(theta).
// I > 0 runs along +alpha (downwards on the inner wall), so A points along T.
inline SphericalPotential static_far_potential(const AnalyticThinTorus& t, double r, double theta) {
  t.validate();
  if (!(r >= 5.0 * t.major_radius)) throw std::domain_error("static_far_potential: need r >= 5R");
  const double vi = t.volume() * t.current, r3 = r * r * r;
  return {-units::mu0_over_4pi * vi / (2.0 * units::pi * r3) * std::cos(theta),
          -units::mu0_over_4pi * vi / (4.0 * units::pi * r3) * std::sin(theta)};
}

inline double on_axis_potential(const AnalyticThinTorus& t, double z) {
  t.validate();
  const double r0 = t.minor_radius, rr = t.major_radius;
  return -units::mu0_over_4pi * units::pi * r0 * r0 * rr * t.current / std::pow(rr * rr + z * z, 1.5);
}

// T_z = 1/(10c) int [z (r.j) - 2 r^2 j_z] = -V I / (4 pi c) for the thin torus.
inline double toroidal_moment(const AnalyticThinTorus& t) {
  t.validate();
  return -t.volume() * t.current / (4.0 * units::pi * units::speed_of_light);
}

// (1/2) int (r x j)_phi dV over the whole torus: -pi r0^2 I.
inline double circulating_moment(const AnalyticThinTorus& t) {
  t.validate();
  return -units::pi * t.minor_radius * t.minor_radius * t.current;
}

// Unnormalised |A_rad| ~ k^3 sin(theta) / r, valid for k * size <= 0.1.
inline double radiated_pattern(double k, double r, double theta, double size) {
  if (!(k * size <= 0.1)) throw std::domain_error("radiated_pattern: needs k * size <= 0.1");
  if (!(r > 0.0)) throw std::invalid_argument("radiated_pattern: r must be > 0");
  return k * k * k * std::sin(theta) / r;
}

// hbar^2 q^2 / (2 m* radius^2) [meV].
inline double ring_spectrum(double radius, double q, double effective_mass = units::default_effective_mass) {
  if (!(radius > 0.0)) throw std::invalid_argument("ring_spectrum: radius must be > 0");
  return units::hbar2_over_2m(effective_mass) * q * q / (radius * radius);
}

}  // namespace toroid::oracles
