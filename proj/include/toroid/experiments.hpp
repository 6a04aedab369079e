#pragma once

// Building blocks shared by the scenario runner and the acceptance checks:
// pulse trains from a scenario, driven runs with their time series, the
// static field of the steady state, radiation analysis and the probe sweep.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <vector>

#include "toroid/dynamics.hpp"
#include "toroid/observables.hpp"
#include "toroid/probe.hpp"
#include "toroid/pulses.hpp"
#include "toroid/scenario.hpp"
#include "toroid/spectrum.hpp"

namespace toroid {

// One pulse pair per schedule entry, pair starts `spacing` apart. The linear
// pulse amplitude matches the local CVB amplitude at rho = R.
inline PulseTrain make_train(const PulseConfig& p, double e_peak, double major_radius) {
  PulseSegment cvb;
  cvb.kind = PulseKind::RadialCVB;
  cvb.photon_energy = p.photon_energy;
  cvb.n_cycles = p.cycles;
  cvb.waist = p.waist;
  cvb.host_wavelength = p.host_wavelength;
  cvb.amplitude = amplitude_from_field(e_peak, p.photon_energy);
  PulseSegment lin = cvb;
  lin.kind = PulseKind::LinearZ;
  lin.amplitude = cvb.amplitude * cvb_profile(cvb, major_radius, 0.0).radial;
  const double spacing = p.spacing > 0.0 ? p.spacing : cvb.duration() + 0.25 * cvb.period();
  PulseTrain train;
  for (std::size_t i = 0; i < p.schedule.size(); ++i) {
    for (auto& s : pulse_pair(p.schedule[i], p.start + static_cast<double>(i) * spacing, cvb, lin)) {
      s.validate();
      train.segments.push_back(s);
    }
  }
  train.sort();
  return train;
}

inline double schedule_spacing(const PulseConfig& p) {
  PulseSegment s;
  s.photon_energy = p.photon_energy;
  s.n_cycles = p.cycles;
  return p.spacing > 0.0 ? p.spacing : s.duration() + 0.25 * s.period();
}

struct Prepared {
  SectionGrid grid;
  EigenBasis basis;
};

inline Prepared prepare(const Scenario& sc, double headroom) {
  Prepared out;
  out.grid = build_section_grid(sc.geometry, sc.n_s, sc.n_alpha, sc.padding);
  BasisSpec spec = sc.basis;
  spec.headroom = headroom;
  spec.photon_energy = sc.pulses.photon_energy;
  out.basis = build_basis(out.grid, spec);
  return out;
}

struct DriveOptions {
  double end = 30.0;
  int steps_per_cycle = 64;
  int sample_every = 8;
  double series_window = 0.0;  // secular window for the T/M series; <= 0 keeps the full state
  bool radiation = false;      // record moment series for the far field
};

struct DriveRun {
  std::vector<double> time, tz, tz_free, m_phi, j_z, polar, a_cvb, a_lin;
  RadiationSource radiation_full, radiation_static;
  BlockDensityMatrix final_state;
  double dt = 0.0;
  double trace_drift = 0.0;
  double min_eigenvalue = INFINITY;
  double hermiticity = 0.0;
  bool track_spectrum = false;  // fill min_eigenvalue (costly)

  double peak_abs_tz() const {
    double m = 0.0;
    for (double v : tz) m = std::max(m, std::abs(v));
    return m;
  }
};

inline DriveRun run_drive(const EigenBasis& basis, const PulseTrain& train, const RelaxationModel& relax,
                          const DriveOptions& opt, bool track_spectrum = false) {
  DriveRun run;
  run.track_spectrum = track_spectrum;
  const SectionGrid& grid = basis.grid;
  InteractionModel im(basis, train);
  const ObservableOperator tz(basis, im.drive(), weights::toroidal_z(grid));
  const ObservableOperator mphi(basis, im.drive(), weights::circulating_moment(grid));
  const ObservableOperator jz(basis, im.drive(), weights::axial_current(grid));
  const ObservableOperator jpol(basis, im.drive(), weights::polar_current(grid));
  std::optional<ObservableOperator> rad_rho, rad_z, rad_phi;
  if (opt.radiation) {
    rad_rho.emplace(basis, im.drive(), weights::radial_moment(grid));
    rad_z.emplace(basis, im.drive(), weights::axial_moment(grid));
    rad_phi.emplace(basis, im.drive(), weights::azimuthal_moment(grid));
  }
  const bool static_part = opt.radiation && relax.kind == RelaxationModel::Kind::RateToThermal && relax.rate > 0.0;
  const double window_static = static_part ? static_window(relax) : 0.0;

  PropagationOptions po;
  po.dt = train.segments.empty() ? 0.01 : step_for(train, opt.steps_per_cycle);
  // whole number of sampling intervals keeps the output grid uniform
  const long chunks = std::max(1L, static_cast<long>(std::ceil(opt.end / (po.dt * opt.sample_every) - 1e-9)));
  po.t_end = static_cast<double>(chunks * opt.sample_every) * po.dt;
  po.sample_every = opt.sample_every;
  run.dt = po.dt;

  BlockDensityMatrix rho = thermal_state(basis);
  const double trace0 = rho.trace();
  const Vec3 ref{grid.major_radius(), 0.0, 0.0};
  propagate(basis, im, relax, rho, po, [&](const BlockDensityMatrix& r) {
    const double t = r.time;
    const BlockDensityMatrix filtered = opt.series_window > 0.0 ? secular_part(basis, r, opt.series_window) : r;
    run.time.push_back(t);
    run.tz.push_back(tz(filtered, t));
    run.tz_free.push_back(tz.field_free(filtered));
    run.m_phi.push_back(mphi(filtered, t));
    run.polar.push_back(jpol(filtered, t));
    run.j_z.push_back(jz(r, t));
    double a_c = 0.0, a_l = 0.0;
    for (const auto& s : train.segments) {
      if (s.kind == PulseKind::RadialCVB) a_c += cvb_vector_potential(s, ref, t)[0];
      else a_l += linear_vector_potential(s, t)[2];
    }
    run.a_cvb.push_back(a_c);
    run.a_lin.push_back(a_l);
    if (opt.radiation) {
      push_radiation_sample(run.radiation_full, t, jz(r, t), (*rad_rho)(r, t), (*rad_z)(r, t), (*rad_phi)(r, t));
      if (static_part) {
        const BlockDensityMatrix st = secular_part(basis, r, window_static);
        push_radiation_sample(run.radiation_static, t, jz(st, t), (*rad_rho)(st, t), (*rad_z)(st, t),
                              (*rad_phi)(st, t));
      }
    }
    run.trace_drift = std::max(run.trace_drift, std::abs(r.trace() - trace0));
    run.hermiticity = std::max(run.hermiticity, r.hermiticity_error());
    if (track_spectrum)
      for (const auto& b : r.blocks)
        if (b.size()) {
          Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(b, Eigen::EigenvaluesOnly);
          run.min_eigenvalue = std::min(run.min_eigenvalue, es.eigenvalues().minCoeff());
        }
  });
  run.final_state = std::move(rho);
  return run;
}

inline DriveOptions drive_options(const Scenario& sc, double series_window) {
  DriveOptions o;
  o.end = sc.time.end;
  o.steps_per_cycle = sc.time.steps_per_cycle;
  o.sample_every = sc.time.sample_every;
  o.series_window = series_window;
  return o;
}

// Static current after the drive: the part of rho that stays put on the
// relaxation time scale.
inline CurrentField steady_current(const EigenBasis& basis, const PulseTrain& train, const RelaxationModel& relax,
                                   double time, int steps_per_cycle) {
  InteractionModel im(basis, train);
  PropagationOptions po;
  po.dt = step_for(train, steps_per_cycle);
  po.t_end = time;
  po.sample_every = 1 << 30;
  BlockDensityMatrix rho = thermal_state(basis);
  propagate(basis, im, relax, rho, po, [](const BlockDensityMatrix&) {});
  const BlockDensityMatrix st = secular_part(basis, rho, static_window(relax));
  return current_density(basis, st, nullptr, rho.time);
}

struct LineFit {
  double slope = 0.0, intercept = 0.0;
};

inline LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n, my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) sxy += (x[k] - mx) * (y[k] - my), sxx += (x[k] - mx) * (x[k] - mx);
  return {sxy / sxx, my - sxy / sxx * mx};
}

struct AxisProfile {
  std::vector<double> z, a_z, fit;
  double coefficient = 0.0;
  double residual = 0.0;  // max |A - fit| / max |A|
};

// A_z on the symmetry axis fitted by c / (R^2 + z^2)^(3/2).
inline AxisProfile axis_profile(const SectionGrid& grid, const CurrentField& f, const BiotSavartOptions& bs,
                                int points = 41) {
  const double rr = grid.major_radius();
  AxisProfile p;
  std::vector<Vec3> pts;
  for (int k = 0; k < points; ++k) {
    p.z.push_back(4.0 * rr * k / (points - 1));
    pts.push_back({0.0, 0.0, p.z.back()});
  }
  const auto a = biot_savart(grid, f, pts, bs);
  double num = 0.0, den = 0.0, peak = 0.0;
  for (int k = 0; k < points; ++k) {
    const double b = std::pow(rr * rr + p.z[k] * p.z[k], -1.5);
    p.a_z.push_back(a[k][2]);
    num += a[k][2] * b;
    den += b * b;
    peak = std::max(peak, std::abs(a[k][2]));
  }
  p.coefficient = num / den;
  for (int k = 0; k < points; ++k) {
    p.fit.push_back(p.coefficient * std::pow(rr * rr + p.z[k] * p.z[k], -1.5));
    p.residual = std::max(p.residual, std::abs(p.a_z[k] - p.fit[k]));
  }
  p.residual /= peak;
  return p;
}

struct FarFieldRay {
  double theta = 0.0;
  std::vector<double> r, magnitude;
  double slope = 0.0;
};

// |A| along rays r in [5R, 20R], slope of log|A| against log r.
inline std::vector<FarFieldRay> far_field(const SectionGrid& grid, const CurrentField& f, const BiotSavartOptions& bs,
                                          const std::vector<double>& thetas, int points = 16) {
  const double rr = grid.major_radius();
  std::vector<FarFieldRay> out;
  for (double th : thetas) {
    FarFieldRay ray;
    ray.theta = th;
    std::vector<Vec3> pts;
    for (int k = 0; k < points; ++k) {
      const double r = 5.0 * rr * std::pow(4.0, static_cast<double>(k) / (points - 1));
      ray.r.push_back(r);
      pts.push_back({r * std::sin(th), 0.0, r * std::cos(th)});
    }
    const auto a = biot_savart(grid, f, pts, bs);
    std::vector<double> lx, ly;
    for (int k = 0; k < points; ++k) {
      ray.magnitude.push_back(std::sqrt(a[k][0] * a[k][0] + a[k][1] * a[k][1] + a[k][2] * a[k][2]));
      lx.push_back(std::log(ray.r[k]));
      ly.push_back(std::log(ray.magnitude[k]));
    }
    ray.slope = fit_line(lx, ly).slope;
    out.push_back(std::move(ray));
  }
  return out;
}

struct FieldMap {
  std::vector<double> x, z;
  std::vector<Vec3> a;
};

// A in the y = 0 half plane, softened inside the source.
inline FieldMap field_map(const SectionGrid& grid, const CurrentField& f, int n_phi, double x_lo, double x_hi,
                          double z_lo, double z_hi, int nx, int nz) {
  BiotSavartOptions bs;
  bs.n_phi = n_phi;
  bs.softening = default_softening(grid);
  FieldMap m;
  std::vector<Vec3> pts;
  for (int iz = 0; iz < nz; ++iz)
    for (int ix = 0; ix < nx; ++ix) {
      const double x = x_lo + (x_hi - x_lo) * ix / (nx - 1), z = z_lo + (z_hi - z_lo) * iz / (nz - 1);
      m.x.push_back(x);
      m.z.push_back(z);
      pts.push_back({x, 0.0, z});
    }
  m.a = biot_savart(grid, f, pts, bs);
  return m;
}

// Pearson correlation.
inline double correlation(const std::vector<double>& a, const std::vector<double>& b) {
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n, mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    sab += (a[k] - ma) * (b[k] - mb);
    saa += (a[k] - ma) * (a[k] - ma);
    sbb += (b[k] - mb) * (b[k] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

struct RadiationPattern {
  double emission_time = 0.0;  // retarded time of the snapshot
  double radius = 0.0;
  std::vector<double> theta, a_theta, reference;
  double correlation = 0.0;
  std::vector<double> r, poynting;
  double poynting_slope = 0.0;
};

// Emission time default: the instant of largest |int j_z| within the drive.
inline double loudest_time(const RadiationSource& src, const PulseTrain& train) {
  double best = 0.0, when = src.times.at(src.times.size() / 2);
  for (std::size_t k = 2; k + 3 < src.times.size(); ++k)
    if (train.active(src.times[k]) && std::abs(src.current[k][2]) > best) best = std::abs(src.current[k][2]), when = src.times[k];
  return when;
}

inline RadiationPattern radiation_pattern(const RadiationSource& src, double major_radius, double distance_in_r,
                                          double emission_time, int n_theta) {
  RadiationPattern p;
  p.emission_time = emission_time;
  p.radius = distance_in_r * major_radius;
  const double c = units::speed_of_light;
  for (int k = 0; k < n_theta; ++k) {
    const double th = units::pi * k / (n_theta - 1);
    const Vec3 x{p.radius * std::sin(th), 0.0, p.radius * std::cos(th)};
    const RadiatedField f = radiated_fields(src, x, emission_time + p.radius / c);
    p.theta.push_back(th);
    p.a_theta.push_back(std::abs(theta_component(f.a, th, 0.0)));
    p.reference.push_back(std::sin(th));
  }
  p.correlation = correlation(p.a_theta, p.reference);
  std::vector<double> lx, ly;
  for (int k = 0; k < 16; ++k) {
    const double r = 5.0 * major_radius * std::pow(4.0, k / 15.0);
    const Vec3 x{r, 0.0, 0.0};
    const double s = radial_poynting(radiated_fields(src, x, emission_time + r / c), x);
    p.r.push_back(r);
    p.poynting.push_back(s);
    lx.push_back(std::log(r));
    ly.push_back(std::log(std::abs(s)));
  }
  p.poynting_slope = fit_line(lx, ly).slope;
  return p;
}

struct EmissionSeries {
  std::vector<double> time, e_full, e_static;  // |E_rad| at the observer against emission time
  double in_pulse_max = 0.0, post_static_max = 0.0, post_full_max = 0.0;
};

// |E_rad| at (r, theta = pi/2). "Post" means emission later than the drive end
// plus `settle`.
inline EmissionSeries emission_series(const DriveRun& run, const PulseTrain& train, double major_radius,
                                      double distance_in_r, double settle) {
  EmissionSeries out;
  const double r = distance_in_r * major_radius, c = units::speed_of_light;
  const Vec3 x{r, 0.0, 0.0};
  const auto& ts = run.radiation_full.times;
  const bool has_static = !run.radiation_static.times.empty();
  auto mag = [](const Vec3& e) { return std::sqrt(e[0] * e[0] + e[1] * e[1] + e[2] * e[2]); };
  for (std::size_t k = 2; k + 3 < ts.size(); ++k) {
    const double te = ts[k];
    out.time.push_back(te);
    const double ef = mag(radiated_fields(run.radiation_full, x, te + r / c).e);
    const double es = has_static ? mag(radiated_fields(run.radiation_static, x, te + r / c).e) : 0.0;
    out.e_full.push_back(ef);
    out.e_static.push_back(es);
    if (train.active(te)) out.in_pulse_max = std::max(out.in_pulse_max, ef);
    if (te > train.end_time() + settle) {
      out.post_static_max = std::max(out.post_static_max, es);
      out.post_full_max = std::max(out.post_full_max, ef);
    }
  }
  return out;
}

struct SpectralPeak {
  double frequency = 0.0;  // rad/ps
  double bin = 0.0;        // spacing [rad/ps]
  Spectrum spectrum;
};

// Peak of the mean-removed series over `min_frequency` < omega.
inline SpectralPeak spectral_peak(const std::vector<double>& t, std::vector<double> v, double t_from,
                                  double min_frequency) {
  std::vector<double> tt, vv;
  for (std::size_t k = 0; k < t.size(); ++k)
    if (t[k] >= t_from) tt.push_back(t[k]), vv.push_back(v[k]);
  const double mean = std::accumulate(vv.begin(), vv.end(), 0.0) / static_cast<double>(vv.size());
  for (auto& x : vv) x -= mean;
  SpectralPeak p;
  p.spectrum = fourier_spectrum(tt, vv);
  p.bin = p.spectrum.frequency.at(1);
  double best = -1.0;
  for (std::size_t k = 1; k < p.spectrum.frequency.size(); ++k)
    if (p.spectrum.frequency[k] > min_frequency && p.spectrum.magnitude[k] > best)
      best = p.spectrum.magnitude[k], p.frequency = p.spectrum.frequency[k];
  return p;
}

// Train analysis: the field-free T_z averaged over one carrier period. The
// diamagnetic current follows A(t) instantly and puts lines at the pair rate,
// which is not what the schedule controls.
inline SpectralPeak train_peak(const DriveRun& run, double photon_energy) {
  const auto [t, v] = cycle_average(run.time, run.tz_free, 2.0 * units::pi * units::hbar / photon_energy);
  return spectral_peak(t, v, t.front(), 0.0);
}

inline FieldFn source_field(const SectionGrid& grid, const CurrentField& f, int n_phi) {
  BiotSavartOptions bs;
  bs.n_phi = n_phi;
  bs.softening = default_softening(grid);
  return [&grid, f, bs](const std::vector<Vec3>& pts) { return biot_savart(grid, f, pts, bs); };
}

}  // namespace toroid
