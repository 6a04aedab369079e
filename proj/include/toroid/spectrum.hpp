#pragma once

// Single-particle spectrum of the torus: for each azimuthal quantum number m the
// cross-section function phi_m(s, alpha) solves
//
//   -hbar^2/2m* [ d_s^2 + (2/s) d_s + (1/s^2) d_alpha^2 - m^2/(R + s cos a)^2
//                 - (R d_s + sin a d_alpha) / (s (R + s cos a)) ] phi + V phi = E phi.
//
// The kinetic bracket equals (1/J)[d_s(J d_s) + d_alpha((J/s^2) d_alpha)] - m^2/rho^2
// with J = s (R + s cos a), which is what gets discretised: a flux-conservative
// five-point stencil that is symmetric under the weighted inner product
// <f, g> = sum f g J ds dalpha.

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "toroid/errors.hpp"
#include "toroid/geometry.hpp"
#include "toroid/lanczos.hpp"
#include "toroid/units.hpp"

namespace toroid {

using SparseMatrix = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

enum class Parity { Even, Odd };  // under alpha -> -alpha

struct BlockHamiltonian {
  int m = 0;
  SparseMatrix stencil;          // H acting on grid values psi_ij (row form, not symmetric)
  SparseMatrix symmetric;        // S = W^{1/2} H W^{-1/2}, symmetrised
  Eigen::VectorXd sqrt_weight;   // sqrt(J ds dalpha) per node
  double presymmetrization_residual = 0.0;  // ||WH - (WH)^T||_F / ||WH||_F
};

namespace detail {

inline Eigen::VectorXd node_weights(const SectionGrid& grid) {
  Eigen::VectorXd w(static_cast<Eigen::Index>(grid.size()));
  for (std::size_t i = 0; i < grid.n_s(); ++i)
    for (std::size_t j = 0; j < grid.n_alpha(); ++j)
      w(static_cast<Eigen::Index>(grid.index(i, j))) = grid.weight(i, static_cast<std::ptrdiff_t>(j));
  return w;
}

}  // namespace detail

inline BlockHamiltonian assemble_hamiltonian(const SectionGrid& grid, int m) {
  const TorusGeometry& g = grid.geometry();
  const double kappa = g.kinetic_scale();
  const double rr = g.major_radius;
  const double ds = grid.ds(), da = grid.dalpha();
  if (!(grid.s(0) > 0.0)) throw std::invalid_argument("assemble_hamiltonian: grid node at s = 0");

  const auto n_s = grid.n_s();
  const auto n_a = static_cast<std::ptrdiff_t>(grid.n_alpha());
  std::vector<Triplet> entries;
  entries.reserve(grid.size() * 5);
  for (std::size_t i = 0; i < n_s; ++i) {
    const double s = grid.s(i);
    const double s_hi = s + 0.5 * ds, s_lo = s - 0.5 * ds;
    for (std::ptrdiff_t j = 0; j < n_a; ++j) {
      const double a = grid.alpha(j);
      const double rho = rr + s * std::cos(a);
      const double jac = s * rho;
      const double j_hi = s_hi * (rr + s_hi * std::cos(a));
      const double j_lo = s_lo * (rr + s_lo * std::cos(a));
      const double g_hi = (rr + s * std::cos(a + 0.5 * da)) / s;
      const double g_lo = (rr + s * std::cos(a - 0.5 * da)) / s;
      const auto row = static_cast<int>(grid.index(i, j));

      const double c_s = kappa / (jac * ds * ds);
      const double c_a = kappa / (jac * da * da);
      double diag = 0.0;
      if (i + 1 < n_s) {
        entries.emplace_back(row, static_cast<int>(grid.index(i + 1, j)), -c_s * j_hi);
        diag += c_s * j_hi;
      } else {
        diag += 2.0 * c_s * j_hi;  // odd ghost node: wall on the outer face
      }
      if (i > 0) entries.emplace_back(row, static_cast<int>(grid.index(i - 1, j)), -c_s * j_lo);
      diag += c_s * j_lo;  // j_lo = 0 on the innermost cell
      entries.emplace_back(row, static_cast<int>(grid.index(i, j + 1)), -c_a * g_hi);
      entries.emplace_back(row, static_cast<int>(grid.index(i, j - 1)), -c_a * g_lo);
      diag += c_a * (g_hi + g_lo);
      diag += kappa * m * m / (rho * rho) + grid.cell_potential(i, j);
      entries.emplace_back(row, row, diag);
    }
  }
  const auto n = static_cast<int>(grid.size());
  BlockHamiltonian out;
  out.m = m;
  out.stencil.resize(n, n);
  out.stencil.setFromTriplets(entries.begin(), entries.end());

  const Eigen::VectorXd w = detail::node_weights(grid);
  SparseMatrix weighted = w.asDiagonal() * out.stencil;
  const SparseMatrix transposed = weighted.transpose();
  const double norm = weighted.norm();
  out.presymmetrization_residual = SparseMatrix(weighted - transposed).norm() / norm;
  if (out.presymmetrization_residual > 1e-6)
    throw NumericalError("assemble_hamiltonian: weighted operator not symmetric (residual " +
                         std::to_string(out.presymmetrization_residual) + ")");
  weighted = 0.5 * (weighted + transposed);
  out.sqrt_weight = w.cwiseSqrt();
  const Eigen::VectorXd inv_sqrt = out.sqrt_weight.cwiseInverse();
  out.symmetric = inv_sqrt.asDiagonal() * weighted * inv_sqrt.asDiagonal();
  out.symmetric.makeCompressed();
  return out;
}

// Orthonormal basis of the alpha -> -alpha even or odd subspace (columns).
inline SparseMatrix parity_projector(const SectionGrid& grid, Parity parity) {
  const auto n_a = static_cast<std::ptrdiff_t>(grid.n_alpha());
  const std::ptrdiff_t half = n_a / 2;
  std::vector<Triplet> entries;
  int col = 0;
  const double r = std::sqrt(0.5);
  for (std::size_t i = 0; i < grid.n_s(); ++i) {
    for (std::ptrdiff_t j = 0; j <= half; ++j) {
      const bool fixed = (j == 0 || j == half);
      const auto a = static_cast<int>(grid.index(i, j));
      const auto b = static_cast<int>(grid.index(i, -j));
      if (parity == Parity::Even) {
        if (fixed) {
          entries.emplace_back(a, col++, 1.0);
        } else {
          entries.emplace_back(a, col, r);
          entries.emplace_back(b, col++, r);
        }
      } else if (!fixed) {
        entries.emplace_back(a, col, r);
        entries.emplace_back(b, col++, -r);
      }
    }
  }
  SparseMatrix p(static_cast<int>(grid.size()), col);
  p.setFromTriplets(entries.begin(), entries.end());
  return p;
}

struct Eigenstate {
  int m = 0;
  int n = 0;              // band index within the m block, by energy
  double energy = 0.0;    // meV
  Parity parity = Parity::Even;
  Eigen::VectorXd psi;    // phi_m on the grid; real because the operator is real
  std::map<int, double> l_weights;
  double occupation = 0.0;
};

struct EigenBlock {
  int m = 0;
  std::vector<Eigenstate> states;  // ascending energy
};

struct EigenBasis {
  TorusGeometry geometry;
  SectionGrid grid;
  std::vector<EigenBlock> blocks;  // m = -m_max .. m_max
  Eigen::VectorXd reference_radial;
  double fermi_level = 0.0;
  double temperature = 0.0;
  double electron_count = 0.0;
  double cutoff = 0.0;

  std::size_t state_count() const {
    std::size_t n = 0;
    for (const auto& b : blocks) n += b.states.size();
    return n;
  }
  const EigenBlock* block(int m) const {
    for (const auto& b : blocks)
      if (b.m == m) return &b;
    return nullptr;
  }
  double ground_energy() const {
    double e = INFINITY;
    for (const auto& b : blocks)
      for (const auto& s : b.states) e = std::min(e, s.energy);
    return e;
  }
};

// Weighted norm squared including the trivial phi integral.
inline double state_norm2(const SectionGrid& grid, const Eigen::VectorXd& psi) {
  double acc = 0.0;
  for (std::size_t i = 0; i < grid.n_s(); ++i)
    for (std::size_t j = 0; j < grid.n_alpha(); ++j) {
      const double v = psi(static_cast<Eigen::Index>(grid.index(i, j)));
      acc += v * v * grid.weight(i, static_cast<std::ptrdiff_t>(j));
    }
  return 2.0 * units::pi * acc;
}

// Ground radial function of the straight-tube limit R -> infinity:
// -hbar^2/2m* (1/s) d_s (s d_s) R0 + V(s) R0 = E R0, normalised as
// 2 pi sum |R0|^2 s ds = 1.
inline Eigen::VectorXd reference_radial(const SectionGrid& grid, double* energy = nullptr) {
  const TorusGeometry& g = grid.geometry();
  const auto n = static_cast<Eigen::Index>(grid.n_s());
  const double ds = grid.ds();
  const double kappa = g.kinetic_scale();
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(n, n);  // symmetric form W^{1/2} H W^{-1/2}
  Eigen::VectorXd w(n);
  for (Eigen::Index i = 0; i < n; ++i) w(i) = grid.s(static_cast<std::size_t>(i)) * ds;
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto iu = static_cast<std::size_t>(i);
    const double s = grid.s(iu);
    const double s_hi = s + 0.5 * ds, s_lo = s - 0.5 * ds;
    double diag = kappa * s_lo / ds;
    if (i + 1 < n) {
      const double off = -kappa * s_hi / ds;
      k(i, i + 1) = off / std::sqrt(w(i) * w(i + 1));
      k(i + 1, i) = k(i, i + 1);
      diag += kappa * s_hi / ds;
    } else {
      diag += 2.0 * kappa * s_hi / ds;
    }
    // Cell-averaged potential with the straight-tube Jacobian s.
    const double lo = grid.s_face(iu), hi = lo + ds;
    const double a = std::max(lo, g.inner_radius()), b = std::min(hi, g.outer_radius());
    const double inside = b > a ? 0.5 * (b * b - a * a) : 0.0;
    const double pot = g.well_depth * (1.0 - inside / (0.5 * (hi * hi - lo * lo)));
    k(i, i) = diag / w(i) + pot;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(k);
  if (solver.info() != Eigen::Success) throw NumericalError("reference_radial: eigensolver failed");
  Eigen::VectorXd u = solver.eigenvectors().col(0);
  if (u.sum() < 0.0) u = -u;
  Eigen::VectorXd r0 = u.cwiseQuotient(w.cwiseSqrt());
  r0 /= std::sqrt(2.0 * units::pi * u.squaredNorm());
  if (energy) *energy = solver.eigenvalues()(0);
  return r0;
}

// <l|phi_n> with <r|l> = R0(s) e^{i l alpha}, rows l = -l_max..l_max, one
// column per state. Both functions are taken in the Jacobian-reduced
// representation sqrt(J) phi, in which the e^{i l alpha} R0 family is exactly
// orthonormal on the grid; the weights therefore obey Bessel's inequality.
inline Eigen::MatrixXcd polar_amplitudes(const SectionGrid& grid, const Eigen::MatrixXd& states,
                                         const Eigen::VectorXd& reference, int l_max = 4) {
  double ref_norm = 0.0;
  for (std::size_t i = 0; i < grid.n_s(); ++i)
    ref_norm += reference(static_cast<Eigen::Index>(i)) * reference(static_cast<Eigen::Index>(i)) *
                grid.s(i) * grid.ds();
  ref_norm *= 2.0 * units::pi;
  if (std::abs(ref_norm - 1.0) > 1e-8)
    throw std::invalid_argument("polar_projection: reference radial function not normalised");

  const double ds = grid.ds(), da = grid.dalpha();
  Eigen::MatrixXcd kernel(2 * l_max + 1, static_cast<Eigen::Index>(grid.size()));
  for (int l = -l_max; l <= l_max; ++l)
    for (std::size_t i = 0; i < grid.n_s(); ++i) {
      const double base = reference(static_cast<Eigen::Index>(i)) * grid.s(i) * ds * da;
      for (std::size_t j = 0; j < grid.n_alpha(); ++j) {
        const auto jj = static_cast<std::ptrdiff_t>(j);
        const double scale = base * std::sqrt(2.0 * units::pi * grid.rho(i, jj));
        kernel(l + l_max, static_cast<Eigen::Index>(grid.index(i, jj))) = scale * std::polar(1.0, -l * grid.alpha(jj));
      }
    }
  return kernel * states.cast<std::complex<double>>();
}

// |<l|phi>|^2 for l = -l_max..l_max.
inline std::map<int, double> polar_projection(const SectionGrid& grid, const Eigen::VectorXd& psi,
                                              const Eigen::VectorXd& reference, int l_max = 4) {
  const Eigen::MatrixXcd amp = polar_amplitudes(grid, psi, reference, l_max);
  std::map<int, double> weights;
  for (int l = -l_max; l <= l_max; ++l) weights[l] = std::norm(amp(l + l_max, 0));
  return weights;
}

// Dominant |l| class of a parity eigenstate: weights of +l and -l are summed.
inline std::pair<int, double> dominant_polar(const std::map<int, double>& weights) {
  std::map<int, double> by_abs;
  for (const auto& [l, w] : weights) by_abs[std::abs(l)] += w;
  auto best = std::max_element(by_abs.begin(), by_abs.end(),
                               [](const auto& a, const auto& b) { return a.second < b.second; });
  return *best;
}

struct SpectrumOptions {
  int l_max = 4;                 // range of the stored polar weights
  double shift_below_ground = 1.0;  // meV, Lanczos shift relative to the ground level
};

namespace detail {

// Residual contract: 1e-8 meV absolute, relaxed to the roundoff floor of the
// operator on very fine grids (the 1/(s dalpha)^2 entries near the axis grow fast).
inline LanczosOptions sector_options(const SparseMatrix& sector) {
  double row_max = 0.0;
  for (int k = 0; k < sector.outerSize(); ++k) {
    double row = 0.0;
    for (SparseMatrix::InnerIterator it(sector, k); it; ++it) row += std::abs(it.value());
    row_max = std::max(row_max, row);
  }
  LanczosOptions opt;
  opt.residual_tolerance = std::max(1e-8, 10.0 * 2.2e-16 * row_max);
  return opt;
}

inline std::vector<Eigenstate> solve_block(const SectionGrid& grid, int m, double shift,
                                           double cutoff) {
  const BlockHamiltonian h = assemble_hamiltonian(grid, m);
  std::vector<Eigenstate> states;
  for (Parity parity : {Parity::Even, Parity::Odd}) {
    const SparseMatrix p = parity_projector(grid, parity);
    const SparseMatrix sector = SparseMatrix(p.transpose() * h.symmetric * p);
    const LanczosOptions opt = sector_options(sector);
    EigenPairs pairs;
    try {
      pairs = lowest_eigenpairs(sector, shift, cutoff, 0, opt);
    } catch (const NumericalError& e) {
      throw NumericalError("spectrum block m=" + std::to_string(m) + ": " + e.what());
    }
    for (Eigen::Index k = 0; k < pairs.values.size(); ++k) {
      Eigenstate st;
      st.m = m;
      st.energy = pairs.values(k);
      st.parity = parity;
      const Eigen::VectorXd u = p * pairs.vectors.col(k);
      st.psi = u.cwiseQuotient(h.sqrt_weight) / std::sqrt(2.0 * units::pi);
      // Fix the sign for reproducibility: largest-magnitude node positive.
      Eigen::Index idx;
      st.psi.cwiseAbs().maxCoeff(&idx);
      if (st.psi(idx) < 0.0) st.psi = -st.psi;
      states.push_back(std::move(st));
    }
  }
  std::sort(states.begin(), states.end(),
            [](const Eigenstate& a, const Eigenstate& b) { return a.energy < b.energy; });
  for (std::size_t n = 0; n < states.size(); ++n) states[n].n = static_cast<int>(n);
  return states;
}

}  // namespace detail

// Lowest eigenvalue of the m = 0 block (global ground level).
inline double ground_level(const SectionGrid& grid) {
  const BlockHamiltonian h = assemble_hamiltonian(grid, 0);
  const SparseMatrix p = parity_projector(grid, Parity::Even);
  const SparseMatrix sector = SparseMatrix(p.transpose() * h.symmetric * p);
  // The operator is positive definite (kinetic >= 0, V >= 0), so zero is a valid shift.
  const EigenPairs pairs = lowest_eigenpairs(sector, 0.0, -INFINITY, 1,
                                             detail::sector_options(sector));
  return pairs.values(0);
}

// All states with E <= cutoff for |m| <= m_max. Blocks with m and -m share
// wavefunctions exactly because only m^2 enters the operator.
inline EigenBasis solve_spectrum(const SectionGrid& grid, int m_max, double cutoff,
                                 const SpectrumOptions& opt = {}) {
  if (m_max < 0) throw std::invalid_argument("solve_spectrum: m_max must be >= 0");
  const double e0 = ground_level(grid);
  if (!(cutoff > e0)) throw std::invalid_argument("solve_spectrum: cutoff below the ground level");
  const double shift = e0 - opt.shift_below_ground;

  std::vector<std::vector<Eigenstate>> positive(static_cast<std::size_t>(m_max) + 1);
#pragma omp parallel for schedule(dynamic)
  for (int m = 0; m <= m_max; ++m)
    positive[static_cast<std::size_t>(m)] = detail::solve_block(grid, m, shift, cutoff);

  EigenBasis basis;
  basis.geometry = grid.geometry();
  basis.grid = grid;
  basis.cutoff = cutoff;
  basis.reference_radial = reference_radial(grid);
  for (auto& block : positive)
    for (auto& st : block) st.l_weights = polar_projection(grid, st.psi, basis.reference_radial, opt.l_max);

  for (int m = -m_max; m <= m_max; ++m) {
    EigenBlock b;
    b.m = m;
    b.states = positive[static_cast<std::size_t>(std::abs(m))];
    for (auto& st : b.states) st.m = m;
    basis.blocks.push_back(std::move(b));
  }
  return basis;
}

inline double fermi_dirac(double energy, double fermi_level, double temperature) {
  if (temperature <= 0.0) {
    if (energy < fermi_level) return 1.0;
    return energy > fermi_level ? 0.0 : 0.5;
  }
  const double x = (energy - fermi_level) / (units::boltzmann * temperature);
  if (x > 700.0) return 0.0;
  if (x < -700.0) return 1.0;
  return 1.0 / (1.0 + std::exp(x));
}

// Solves sum_i f(E_i; E_F, T) = N for E_F and stores the occupations.
inline void assign_occupations(EigenBasis& basis, double electron_count, double temperature) {
  if (!(electron_count > 0.0)) throw std::invalid_argument("assign_occupations: N must be > 0");
  if (temperature < 0.0) throw std::invalid_argument("assign_occupations: T must be >= 0");
  std::vector<double> energies;
  for (const auto& b : basis.blocks)
    for (const auto& s : b.states) energies.push_back(s.energy);
  if (electron_count >= static_cast<double>(energies.size()))
    throw std::invalid_argument("assign_occupations: N exceeds the states below the cutoff");
  std::sort(energies.begin(), energies.end());

  if (temperature == 0.0) {
    // Fill degenerate groups in order; the straddling group shares the remainder.
    double remaining = electron_count;
    std::size_t k = 0;
    double level = energies.front();
    double fraction = 1.0;
    while (k < energies.size() && remaining > 1e-12) {
      std::size_t end = k;
      while (end < energies.size() && energies[end] - energies[k] <= 1e-9 * std::max(1.0, std::abs(energies[k])))
        ++end;
      const double group = static_cast<double>(end - k);
      level = energies[k];
      fraction = std::min(1.0, remaining / group);
      remaining -= fraction * group;
      k = end;
    }
    basis.fermi_level = level;
    for (auto& b : basis.blocks)
      for (auto& s : b.states) {
        if (s.energy < level - 1e-9 * std::max(1.0, std::abs(level))) s.occupation = 1.0;
        else if (s.energy <= level + 1e-9 * std::max(1.0, std::abs(level))) s.occupation = fraction;
        else s.occupation = 0.0;
      }
  } else {
    const double kt = units::boltzmann * temperature;
    double lo = energies.front() - 50.0 * kt - 1.0;
    double hi = energies.back() + 50.0 * kt + 1.0;
    auto count = [&](double ef) {
      double acc = 0.0;
      for (double e : energies) acc += fermi_dirac(e, ef, temperature);
      return acc;
    };
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      (count(mid) < electron_count ? lo : hi) = mid;
    }
    basis.fermi_level = 0.5 * (lo + hi);
    for (auto& b : basis.blocks)
      for (auto& s : b.states) s.occupation = fermi_dirac(s.energy, basis.fermi_level, temperature);
  }
  basis.temperature = temperature;
  basis.electron_count = electron_count;
}

// Drops states above `cutoff` and renumbers band indices.
inline void truncate_basis(EigenBasis& basis, double cutoff) {
  for (auto& b : basis.blocks) {
    std::erase_if(b.states, [&](const Eigenstate& s) { return s.energy > cutoff; });
    for (std::size_t n = 0; n < b.states.size(); ++n) b.states[n].n = static_cast<int>(n);
  }
  basis.cutoff = cutoff;
}

struct BasisSpec {
  int m_max = 40;
  double electron_count = 19.0;
  double temperature = 4.0;       // K
  double headroom = 5.0;          // cutoff = E_F + headroom * photon energy
  double photon_energy = 2.5;     // meV
};

// Solve, occupy, and truncate to E <= E_F + headroom * hbar omega.
inline EigenBasis build_basis(const SectionGrid& grid, const BasisSpec& spec,
                              const SpectrumOptions& opt = {}) {
  const double e0 = ground_level(grid);
  double cutoff = e0 + 2.0 * spec.headroom * spec.photon_energy;
  for (int attempt = 0; attempt < 8; ++attempt) {
    EigenBasis basis = solve_spectrum(grid, spec.m_max, cutoff, opt);
    if (spec.electron_count >= static_cast<double>(basis.state_count())) {
      cutoff += 2.0 * spec.headroom * spec.photon_energy;
      continue;
    }
    assign_occupations(basis, spec.electron_count, spec.temperature);
    const double wanted = basis.fermi_level + spec.headroom * spec.photon_energy;
    if (wanted > cutoff) {
      cutoff = wanted + spec.photon_energy;
      continue;
    }
    truncate_basis(basis, wanted);
    assign_occupations(basis, spec.electron_count, spec.temperature);
    return basis;
  }
  throw NumericalError("build_basis: could not bracket the Fermi level");
}

}  // namespace toroid
