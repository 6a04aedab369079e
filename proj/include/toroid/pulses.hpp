#pragma once

// THz drive: radially polarised cylindrical vector beam (CVB) plus a spatially
// homogeneous z-polarised pulse, both with a sin^2 envelope.
//
// Both segment kinds use the carrier sin(omega (t - t0)). A delay of T0/4
// between the two then produces a quarter-period phase lag, i.e. a locally
// circular field in the x-z plane.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include "toroid/geometry.hpp"
#include "toroid/units.hpp"

namespace toroid {

enum class PulseKind { RadialCVB, LinearZ };

struct PulseSegment {
  PulseKind kind = PulseKind::RadialCVB;
  // CVB: spatial amplitude at rho = w0/sqrt(2), z = 0 [mV ps/nm].
  // LinearZ: B0 [mV ps/nm].
  double amplitude = 0.0;
  double photon_energy = 2.5;  // meV
  double n_cycles = 2.0;
  double start_time = 0.0;     // ps
  double waist = 4.0 * units::micrometre;             // w0 [nm]
  double host_wavelength = 138.0 * units::micrometre; // lambda [nm]
  double phase_sign = 1.0;

  double omega() const { return photon_energy / units::hbar; }
  double period() const { return 2.0 * units::pi / omega(); }
  double duration() const { return n_cycles * period(); }
  double end_time() const { return start_time + duration(); }
  double rayleigh_range() const { return units::pi * waist * waist / host_wavelength; }
  double wavenumber() const { return 2.0 * units::pi / host_wavelength; }

  bool active(double t) const { return t > start_time && t < end_time(); }

  double envelope(double t) const {
    if (!active(t)) return 0.0;
    const double x = std::sin(units::pi * (t - start_time) / duration());
    return x * x;
  }
  // Omega(t - t0) sin(omega (t - t0)) with the segment sign.
  double time_factor(double t) const {
    if (!active(t)) return 0.0;
    return phase_sign * envelope(t) * std::sin(omega() * (t - start_time));
  }
  double time_derivative(double t) const {
    if (!active(t)) return 0.0;
    const double tau = t - start_time;
    const double a = units::pi / duration();
    const double env_dot = a * std::sin(2.0 * a * tau);
    return phase_sign * (env_dot * std::sin(omega() * tau) +
                         envelope(t) * omega() * std::cos(omega() * tau));
  }

  void validate() const {
    if (!(amplitude >= 0.0)) throw std::invalid_argument("pulse amplitude must be >= 0");
    if (!(photon_energy > 0.0)) throw std::invalid_argument("photon energy must be > 0");
    if (!(n_cycles > 0.0)) throw std::invalid_argument("pulse duration must be > 0");
    if (kind == PulseKind::RadialCVB && !(waist > 0.0 && host_wavelength > 0.0))
      throw std::invalid_argument("CVB waist and wavelength must be > 0");
    if (phase_sign != 1.0 && phase_sign != -1.0) throw std::invalid_argument("phase sign must be +1 or -1");
  }
};

// Amplitude that gives max |dA/dt| ~ E_peak: A = E/omega. E in mV/nm.
inline double amplitude_from_field(double e_peak, double photon_energy) {
  return e_peak / (photon_energy / units::hbar);
}

struct CvbProfile {
  double radial = 0.0;      // A_rho / amplitude (real part of the complex envelope)
  double divergence = 0.0;  // (1/rho) d_rho(rho A_rho) / amplitude [1/nm]
};

// Spatial part of the CVB, normalised to 1 at rho = w0/sqrt(2), z = 0. The
// polarisation is purely radial, so A_z = 0 and only the rho derivative enters
// the divergence.
inline CvbProfile cvb_profile(const PulseSegment& seg, double rho, double z) {
  const double w0 = seg.waist, zr = seg.rayleigh_range(), k = seg.wavenumber();
  const double w2 = w0 * w0 * (1.0 + (z / zr) * (z / zr));
  const double inv_rc = z / (z * z + zr * zr);  // 1/R(z), finite at z = 0
  const double gouy = std::atan(z / zr);
  const double norm = 1.0 / (w0 / std::sqrt(2.0) * std::exp(-0.5));
  const double a = norm * (w0 * w0 / w2);
  const double gauss = std::exp(-rho * rho / w2);
  const double theta = 0.5 * k * rho * rho * inv_rc - 2.0 * gouy;
  CvbProfile p;
  p.radial = a * rho * gauss * std::cos(theta);
  p.divergence = a * gauss *
                 ((2.0 - 2.0 * rho * rho / w2) * std::cos(theta) - k * rho * rho * inv_rc * std::sin(theta));
  return p;
}

inline Vec3 cvb_vector_potential(const PulseSegment& seg, const Vec3& r, double t) {
  if (seg.kind != PulseKind::RadialCVB) throw std::invalid_argument("cvb_vector_potential: not a CVB segment");
  const double f = seg.time_factor(t);
  if (f == 0.0) return {0.0, 0.0, 0.0};
  const double rho = std::hypot(r[0], r[1]);
  if (rho == 0.0) return {0.0, 0.0, 0.0};
  const double a = seg.amplitude * cvb_profile(seg, rho, r[2]).radial * f;
  return {a * r[0] / rho, a * r[1] / rho, 0.0};
}

inline Vec3 linear_vector_potential(const PulseSegment& seg, double t) {
  if (seg.kind != PulseKind::LinearZ) throw std::invalid_argument("linear_vector_potential: not a linear segment");
  return {0.0, 0.0, seg.amplitude * seg.time_factor(t)};
}

// Integral of time_factor from the segment start to t, composite Simpson on a
// fixed grid of `steps_per_cycle` intervals per optical cycle.
inline double integrated_time_factor(const PulseSegment& seg, double t, int steps_per_cycle = 256) {
  if (t <= seg.start_time) return 0.0;
  const double upper = std::min(t, seg.end_time());
  const double span = upper - seg.start_time;
  int n = std::max(2, static_cast<int>(std::ceil(span / seg.period() * steps_per_cycle)));
  if (n % 2) ++n;
  const double h = span / n;
  double acc = 0.0;
  for (int k = 0; k <= n; ++k) {
    const double w = (k == 0 || k == n) ? 1.0 : (k % 2 ? 4.0 : 2.0);
    acc += w * seg.time_factor(seg.start_time + k * h);
  }
  return acc * h / 3.0;
}

// Lorenz gauge, Phi = -c^2 int div A dt, for a field whose spatial divergence
// (per unit amplitude) is `divergence` and whose time dependence is the segment's.
inline double lorenz_scalar_potential(const PulseSegment& seg, double divergence, double t) {
  const double c = units::speed_of_light;
  return -c * c * seg.amplitude * divergence * integrated_time_factor(seg, t);
}

inline double cvb_scalar_potential(const PulseSegment& seg, const Vec3& r, double t) {
  if (seg.kind != PulseKind::RadialCVB) throw std::invalid_argument("cvb_scalar_potential: not a CVB segment");
  const double rho = std::hypot(r[0], r[1]);
  return lorenz_scalar_potential(seg, cvb_profile(seg, rho, r[2]).divergence, t);
}

struct PulseTrain {
  std::vector<PulseSegment> segments;

  void sort() {
    std::stable_sort(segments.begin(), segments.end(),
                     [](const PulseSegment& a, const PulseSegment& b) { return a.start_time < b.start_time; });
  }
  double end_time() const {
    double t = 0.0;
    for (const auto& s : segments) t = std::max(t, s.end_time());
    return t;
  }
  double start_time() const {
    double t = INFINITY;
    for (const auto& s : segments) t = std::min(t, s.start_time);
    return segments.empty() ? 0.0 : t;
  }
  bool active(double t) const {
    return std::any_of(segments.begin(), segments.end(), [&](const PulseSegment& s) { return s.active(t); });
  }
  double shortest_period() const {
    double p = INFINITY;
    for (const auto& s : segments) p = std::min(p, s.period());
    return p;
  }

  Vec3 vector_potential(const Vec3& r, double t) const {
    Vec3 a{0.0, 0.0, 0.0};
    for (const auto& s : segments) {
      const Vec3 v = s.kind == PulseKind::RadialCVB ? cvb_vector_potential(s, r, t) : linear_vector_potential(s, t);
      for (int k = 0; k < 3; ++k) a[k] += v[k];
    }
    return a;
  }
};

// Pulse-pair presets. `cvb` and `linear` carry amplitudes and carrier settings;
// their start times are overwritten. PS I: CVB first, linear delayed by +T0/4.
// PS II: linear first, CVB delayed by T0/4 (delay -T0/4 of the linear pulse).
enum class SequenceKind { PS_I, PS_II };

inline std::vector<PulseSegment> pulse_pair(SequenceKind kind, double t0, PulseSegment cvb, PulseSegment linear) {
  cvb.kind = PulseKind::RadialCVB;
  linear.kind = PulseKind::LinearZ;
  const double quarter = 0.25 * cvb.period();
  if (kind == SequenceKind::PS_I) {
    cvb.start_time = t0;
    linear.start_time = t0 + quarter;
    return {cvb, linear};
  }
  linear.start_time = t0;
  cvb.start_time = t0 + quarter;
  return {linear, cvb};
}

// Local (A_x, A_z) at the reference point x = R, y = z = 0.
inline std::array<double, 2> combined_local_field(const PulseTrain& train, double major_radius, double t) {
  const Vec3 a = train.vector_potential({major_radius, 0.0, 0.0}, t);
  return {a[0], a[2]};
}

// 1/2 sum (x dz - z dx) over a closed or open sampled path in the (A_x, A_z) plane.
inline double signed_loop_area(const std::vector<std::array<double, 2>>& path) {
  double area = 0.0;
  for (std::size_t k = 0; k + 1 < path.size(); ++k)
    area += path[k][0] * path[k + 1][1] - path[k][1] * path[k + 1][0];
  return 0.5 * area;
}

}  // namespace toroid
