#pragma once

// Ultra-thin probe torus T2 sitting in a frozen, cylindrically symmetric A(r).
// Electrons live on the cross-section circle of radius r2; only the polar
// quantum number l couples to A, through the circulation gamma.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <map>
#include <stdexcept>
#include <vector>

#include "toroid/geometry.hpp"
#include "toroid/oracles.hpp"
#include "toroid/units.hpp"

namespace toroid {

struct ProbeTorus {
  double major_radius = 150.0;  // R2
  double minor_radius = 15.0;   // r2
  double height = 30.0;         // d_z, centre plane above the source
  int electrons = 19;
  double temperature = 4.0;     // K
  double effective_mass = units::default_effective_mass;

  void validate() const {
    if (!(major_radius > minor_radius && minor_radius > 0.0)) throw std::invalid_argument("probe: need R2 > r2 > 0");
    if (electrons < 0) throw std::invalid_argument("probe: electron count must be >= 0");
    if (!(temperature >= 0.0)) throw std::invalid_argument("probe: temperature must be >= 0");
  }
  double kappa() const { return units::hbar2_over_2m(effective_mass); }
};

// Evaluates A [mV ps/nm] at a batch of Cartesian points.
using FieldFn = std::function<std::vector<Vec3>(const std::vector<Vec3>&)>;

// Tangential component of A along the cross-section circle, alpha_k = 2 pi k / n.
struct LoopSamples {
  double radius = 0.0;
  std::vector<double> tangential;

  double dalpha() const { return 2.0 * units::pi / static_cast<double>(tangential.size()); }
  // Periodic trapezoid; spectrally accurate for smooth A.
  double circulation() const {
    double acc = 0.0;
    for (double a : tangential) acc += a;
    return acc * radius * dalpha();
  }
};

inline std::vector<Vec3> probe_loop(const ProbeTorus& p, double phi, int n) {
  std::vector<Vec3> pts(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    const double a = 2.0 * units::pi * k / n;
    const double rho = p.major_radius + p.minor_radius * std::cos(a);
    pts[static_cast<std::size_t>(k)] = {rho * std::cos(phi), rho * std::sin(phi), p.height + p.minor_radius * std::sin(a)};
  }
  return pts;
}

inline LoopSamples sample_loop(const FieldFn& field, const ProbeTorus& p, double phi = 0.0, int n = 256) {
  p.validate();
  if (n < 8) throw std::invalid_argument("sample_loop: need at least 8 points");
  const std::vector<Vec3> a = field(probe_loop(p, phi, n));
  if (a.size() != static_cast<std::size_t>(n)) throw std::domain_error("sample_loop: field returned wrong sample count");
  LoopSamples out{p.minor_radius, std::vector<double>(static_cast<std::size_t>(n))};
  const double c = std::cos(phi), s = std::sin(phi);
  for (int k = 0; k < n; ++k) {
    const auto& v = a[static_cast<std::size_t>(k)];
    if (!std::isfinite(v[0]) || !std::isfinite(v[1]) || !std::isfinite(v[2]))
      throw std::domain_error("sample_loop: field not evaluable on the probe circle");
    const double al = 2.0 * units::pi * k / n;
    const double a_rho = v[0] * c + v[1] * s;
    out.tangential[static_cast<std::size_t>(k)] = -std::sin(al) * a_rho + std::cos(al) * v[2];
  }
  return out;
}

inline double circulation_to_gamma(double loop_integral) {
  return units::carrier_charge * loop_integral / (2.0 * units::pi * units::hbar);
}

// gamma = (q / 2 pi hbar) closed-integral A.dl around the cross-section at azimuth phi.
inline double polar_flux(const FieldFn& field, const ProbeTorus& p, double phi = 0.0, int n = 256) {
  return circulation_to_gamma(sample_loop(field, p, phi, n).circulation());
}

struct PolarLevel {
  int l = 0;
  double energy = 0.0;            // with the AB shift
  double energy_unshifted = 0.0;  // gamma = 0 reference
  double occupation = 0.0;
  std::map<int, double> weights;  // plane-wave content |<l'|psi>|^2
};

struct PolarSpectrum {
  double gamma = 0.0;
  double chemical_potential = 0.0;
  bool large_flux = false;  // |gamma| > 10
  std::vector<PolarLevel> levels;

  double parabola_vertex() const;  // through the lowest level and its neighbours
};

namespace detail {

inline void fill_occupations(PolarSpectrum& sp, const ProbeTorus& p) {
  const double kt = std::max(units::boltzmann * p.temperature, 1e-6);
  auto count = [&](double mu) {
    double n = 0.0;
    for (const auto& lv : sp.levels) n += 1.0 / (1.0 + std::exp(std::clamp((lv.energy - mu) / kt, -700.0, 700.0)));
    return n;
  };
  if (p.electrons == 0) {
    sp.chemical_potential = sp.levels.front().energy - 50.0 * kt;
  } else {
    double lo = -1.0, hi = 1.0;
    for (const auto& lv : sp.levels) hi = std::max(hi, lv.energy);
    hi += 50.0 * kt;
    lo = -50.0 * kt;
    if (count(hi) < p.electrons) throw std::invalid_argument("probe: not enough polar levels for the electron count");
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      (count(mid) < p.electrons ? lo : hi) = mid;
    }
    sp.chemical_potential = 0.5 * (lo + hi);
  }
  for (auto& lv : sp.levels)
    lv.occupation = 1.0 / (1.0 + std::exp(std::clamp((lv.energy - sp.chemical_potential) / kt, -700.0, 700.0)));
}

inline int level_span(const ProbeTorus& p, double gamma) {
  return p.electrons + static_cast<int>(std::ceil(std::abs(gamma))) + 12;
}

}  // namespace detail

inline double PolarSpectrum::parabola_vertex() const {
  std::size_t arg = 0;
  for (std::size_t i = 1; i < levels.size(); ++i)
    if (levels[i].energy < levels[arg].energy) arg = i;
  if (arg == 0 || arg + 1 >= levels.size()) throw std::logic_error("parabola_vertex: minimum at the edge of the level list");
  const double em = levels[arg - 1].energy, e0 = levels[arg].energy, ep = levels[arg + 1].energy;
  return levels[arg].l - 0.5 * (ep - em) / (ep - 2.0 * e0 + em);
}

// Homogeneous tangential A: E(l) = hbar^2 (l - gamma)^2 / (2 m* r2^2), plane waves.
inline PolarSpectrum shifted_polar_spectrum(const ProbeTorus& p, double gamma) {
  p.validate();
  PolarSpectrum sp;
  sp.gamma = gamma;
  sp.large_flux = std::abs(gamma) > 10.0;
  const int span = detail::level_span(p, gamma);
  const int centre = static_cast<int>(std::lround(gamma));
  for (int l = centre - span; l <= centre + span; ++l) {
    PolarLevel lv;
    lv.l = l;
    lv.energy = oracles::ring_spectrum(p.minor_radius, l - gamma, p.effective_mass);
    lv.energy_unshifted = oracles::ring_spectrum(p.minor_radius, l, p.effective_mass);
    lv.weights[l] = 1.0;
    sp.levels.push_back(lv);
  }
  detail::fill_occupations(sp, p);
  return sp;
}

// Inhomogeneous tangential A. The gauge factor exp(i chi), chi' = (q r2/hbar)(A_t - <A_t>),
// maps the problem onto the homogeneous one, so energies depend on gamma only and
// the eigenstates exp(i(l alpha + chi)) spread over neighbouring plane waves.
inline PolarSpectrum shifted_polar_spectrum(const ProbeTorus& p, const LoopSamples& loop, int weight_window = 4) {
  const double gamma = circulation_to_gamma(loop.circulation());
  PolarSpectrum sp = shifted_polar_spectrum(p, gamma);
  const std::size_t n = loop.tangential.size();
  double mean = 0.0;
  for (double a : loop.tangential) mean += a;
  mean /= static_cast<double>(n);
  const double scale = units::carrier_charge * loop.radius / units::hbar, da = loop.dalpha();
  // chi at the nodes via the periodic trapezoid of (A_t - mean)
  std::vector<double> chi(n, 0.0);
  for (std::size_t k = 1; k < n; ++k)
    chi[k] = chi[k - 1] + scale * 0.5 * da * (loop.tangential[k - 1] + loop.tangential[k] - 2.0 * mean);
  std::vector<std::complex<double>> phase(n);
  for (std::size_t k = 0; k < n; ++k) phase[k] = std::polar(1.0, chi[k]);
  // |<l + d| exp(i chi) |l>|^2 is independent of l.
  std::map<int, double> profile;
  for (int d = -weight_window; d <= weight_window; ++d) {
    std::complex<double> c = 0.0;
    for (std::size_t k = 0; k < n; ++k) c += phase[k] * std::polar(1.0, -d * da * static_cast<double>(k));
    profile[d] = std::norm(c / static_cast<double>(n));
  }
  for (auto& lv : sp.levels) {
    lv.weights.clear();
    for (const auto& [d, w] : profile) lv.weights[lv.l + d] = w;
  }
  return sp;
}

// Independent check: tight-binding ring with Peierls phases on the alpha grid.
inline Eigen::VectorXd lattice_polar_energies(const ProbeTorus& p, const LoopSamples& loop) {
  const int n = static_cast<int>(loop.tangential.size());
  const double h = loop.dalpha() * loop.radius;
  const double t = p.kappa() / (h * h);
  Eigen::MatrixXcd ham = Eigen::MatrixXcd::Zero(n, n);
  for (int k = 0; k < n; ++k) {
    const int next = (k + 1) % n;
    const double theta = units::carrier_charge / units::hbar * h * 0.5 *
                         (loop.tangential[static_cast<std::size_t>(k)] + loop.tangential[static_cast<std::size_t>(next)]);
    ham(k, k) = 2.0 * t;
    ham(next, k) = -t * std::polar(1.0, theta);
    ham(k, next) = std::conj(ham(next, k));
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(ham, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

// Sum_l f_l (l - gamma); zero for symmetric occupation at gamma = 0.
inline double net_polar_quanta(const PolarSpectrum& sp) {
  double acc = 0.0;
  for (const auto& lv : sp.levels) acc += lv.occupation * (lv.l - sp.gamma);
  return acc;
}

// Each electron circulating the section carries q v / (2 pi r2), v = hbar (l - gamma) / (m* r2),
// spread uniformly in phi; feed the total into the thin-torus relation.
inline double induced_toroidization(const ProbeTorus& p, const PolarSpectrum& sp) {
  const double r2 = p.minor_radius;
  const double current = units::carrier_charge * (2.0 * p.kappa() / units::hbar) * net_polar_quanta(sp) /
                         (2.0 * units::pi * r2 * r2);
  return oracles::toroidal_moment({p.major_radius, r2, current});
}

struct ProbePoint {
  double height = 0.0, gamma = 0.0, moment = 0.0;
};

inline std::vector<ProbePoint> probe_sweep(const FieldFn& field, ProbeTorus p, const std::vector<double>& heights,
                                           int n_loop = 256) {
  std::vector<ProbePoint> out;
  for (double dz : heights) {
    p.height = dz;
    const LoopSamples loop = sample_loop(field, p, 0.0, n_loop);
    const PolarSpectrum sp = shifted_polar_spectrum(p, loop);
    out.push_back({dz, sp.gamma, induced_toroidization(p, sp)});
  }
  return out;
}

}  // namespace toroid
