#pragma once

// Density-matrix propagation in the eigenbasis. The drive is cylindrically
// symmetric, so the interaction never couples different m and the density
// matrix stays block diagonal; blocks m and -m share wavefunctions and hence
// interaction matrices.
//
// H_int = (i q hbar / 2m*) [div A + 2 A.grad] + (q^2 / 2m*) A^2 + q Phi

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "toroid/errors.hpp"
#include "toroid/fields.hpp"
#include "toroid/pulses.hpp"
#include "toroid/spectrum.hpp"
#include "toroid/units.hpp"

namespace toroid {

using cdouble = std::complex<double>;

enum class ScalarPotential { Off, Lorenz };

namespace detail {

// Index into basis.blocks of the block with azimuthal number |m|.
inline std::size_t mirror_block(const EigenBasis& basis, std::size_t b) {
  const int m = std::abs(basis.blocks[b].m);
  for (std::size_t k = 0; k < basis.blocks.size(); ++k)
    if (basis.blocks[k].m == m) return k;
  throw std::logic_error("basis has no block for |m|");
}

// Columns are the states of a block.
inline Eigen::MatrixXd state_matrix(const EigenBlock& block, Eigen::Index cells) {
  Eigen::MatrixXd psi(cells, static_cast<Eigen::Index>(block.states.size()));
  for (std::size_t n = 0; n < block.states.size(); ++n) psi.col(static_cast<Eigen::Index>(n)) = block.states[n].psi;
  return psi;
}

inline Eigen::VectorXd quadrature_weights(const SectionGrid& grid) {
  return 2.0 * units::pi * detail::node_weights(grid);
}

}  // namespace detail

class InteractionModel {
 public:
  InteractionModel(const EigenBasis& basis, const PulseTrain& train, ScalarPotential mode = ScalarPotential::Off)
      : drive_(basis.grid, train), mode_(mode), kinetic_scale_(basis.geometry.kinetic_scale()) {
    const SectionGrid& grid = basis.grid;
    const auto cells = static_cast<Eigen::Index>(grid.size());
    const Eigen::VectorXd w = detail::quadrature_weights(grid);
    const SectionFaces faces = section_faces(grid);
    const auto& groups = drive_.groups();
    const std::size_t n_g = groups.size();
    const double c2 = units::speed_of_light * units::speed_of_light;

    owner_.resize(basis.blocks.size());
    couplings_.resize(basis.blocks.size());
    for (std::size_t b = 0; b < basis.blocks.size(); ++b) owner_[b] = detail::mirror_block(basis, b);

    for (std::size_t b = 0; b < basis.blocks.size(); ++b) {
      if (owner_[b] != b) continue;
      const EigenBlock& block = basis.blocks[b];
      for (const auto& st : block.states)
        if (std::abs(state_norm2(grid, st.psi) - 1.0) > 1e-8)
          throw std::invalid_argument("interaction_elements: unnormalised eigenstate");
      const Eigen::MatrixXd psi = detail::state_matrix(block, cells);
      const auto n = psi.cols();
      Coupling& c = couplings_[b];
      c.dim = n;
      if (n == 0) continue;
      const Eigen::MatrixXd wpsi = w.asDiagonal() * psi;
      const Eigen::MatrixXd from = gather_rows(psi, faces.from), to = gather_rows(psi, faces.to);
      for (std::size_t g = 0; g < n_g; ++g) {
        const FieldGroup& fg = groups[g];
        // int a.(phi_n grad phi_n' - phi_n' grad phi_n), which equals the literal
        // int phi_n (div a + 2 a.grad) phi_n' after integration by parts.
        const Eigen::VectorXd c_f = 2.0 * units::pi * faces.coupling.cwiseProduct(face_projection(fg, faces));
        const Eigen::MatrixXd half = from.transpose() * (c_f.asDiagonal() * to);
        c.paramagnetic.push_back(half - half.transpose());
        c.scalar.push_back(wpsi.transpose() * ((-c2 * fg.divergence).asDiagonal() * psi));
      }
      for (std::size_t g = 0; g < n_g; ++g)
        for (std::size_t h = 0; h < n_g; ++h) {
          const Eigen::VectorXd dot = groups[g].a_s.cwiseProduct(groups[h].a_s) +
                                      groups[g].a_alpha.cwiseProduct(groups[h].a_alpha);
          c.quadratic.push_back(wpsi.transpose() * (dot.asDiagonal() * psi));
        }
    }
  }

  const SectionDrive& drive() const { return drive_; }
  ScalarPotential scalar_potential() const { return mode_; }
  std::size_t owner(std::size_t block) const { return owner_[block]; }

  // H_int for block b at time t [meV].
  Eigen::MatrixXcd hamiltonian(std::size_t b, double t) const {
    const Coupling& c = couplings_[owner_[b]];
    const std::size_t n_g = drive_.groups().size();
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(c.dim, c.dim);
    if (c.dim == 0) return h;
    const double q = units::carrier_charge;
    const double kappa_over_hbar = kinetic_scale_ / units::hbar;
    std::vector<double> f(n_g);
    for (std::size_t g = 0; g < n_g; ++g) f[g] = drive_.factor(g, t);
    for (std::size_t g = 0; g < n_g; ++g) {
      if (f[g] == 0.0) continue;
      h += cdouble(0.0, q * kappa_over_hbar * f[g]) * c.paramagnetic[g].cast<cdouble>();
      for (std::size_t k = 0; k < n_g; ++k)
        if (f[k] != 0.0)
          h += (q * q * kappa_over_hbar / units::hbar * f[g] * f[k]) * c.quadratic[g * n_g + k].cast<cdouble>();
    }
    if (mode_ == ScalarPotential::Lorenz)
      for (std::size_t g = 0; g < n_g; ++g)
        if (drive_.groups()[g].kind == PulseKind::RadialCVB) {
          const double big_g = drive_.integrated(g, t);
          if (big_g != 0.0) h += (q * big_g) * c.scalar[g].cast<cdouble>();
        }
    return h;
  }

 private:
  struct Coupling {
    Eigen::Index dim = 0;
    std::vector<Eigen::MatrixXd> paramagnetic;  // antisymmetric, per group
    std::vector<Eigen::MatrixXd> quadratic;     // per group pair
    std::vector<Eigen::MatrixXd> scalar;        // per group, per unit integrated amplitude
  };
  SectionDrive drive_;
  ScalarPotential mode_;
  double kinetic_scale_;
  std::vector<std::size_t> owner_;
  std::vector<Coupling> couplings_;
};

struct RelaxationModel {
  enum class Kind { None, RateToThermal };
  Kind kind = Kind::RateToThermal;
  double rate = 1.0 / 50.0;  // Gamma [1/ps]
  bool pauli_blocking = false;

  void validate() const {
    if (!(rate >= 0.0)) throw std::invalid_argument("relaxation rate must be >= 0");
  }
};

struct BlockDensityMatrix {
  double time = 0.0;
  std::vector<Eigen::MatrixXcd> blocks;  // aligned with basis.blocks

  double trace() const {
    double t = 0.0;
    for (const auto& b : blocks) t += b.trace().real();
    return t;
  }
  double hermiticity_error() const {
    double e = 0.0;
    for (const auto& b : blocks)
      if (b.size()) e = std::max(e, (b - b.adjoint()).cwiseAbs().maxCoeff());
    return e;
  }
};

inline BlockDensityMatrix thermal_state(const EigenBasis& basis) {
  BlockDensityMatrix rho;
  for (const auto& block : basis.blocks) {
    const auto n = static_cast<Eigen::Index>(block.states.size());
    Eigen::MatrixXcd r = Eigen::MatrixXcd::Zero(n, n);
    for (Eigen::Index k = 0; k < n; ++k) r(k, k) = block.states[static_cast<std::size_t>(k)].occupation;
    rho.blocks.push_back(std::move(r));
  }
  return rho;
}

namespace detail {

inline double transition_rate(const RelaxationModel& model, double e_from, double e_to, double temperature) {
  if (e_to <= e_from) return model.rate;
  if (temperature <= 0.0) return 0.0;
  return model.rate * std::exp(-(e_to - e_from) / (units::boltzmann * temperature));
}

// d P_n / dt of the Pauli-blocked rate equation within one block.
inline Eigen::VectorXd pauli_rates(const RelaxationModel& model, const EigenBlock& block, const Eigen::VectorXd& p,
                                   double temperature) {
  const auto n = p.size();
  Eigen::VectorXd d = Eigen::VectorXd::Zero(n);
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = 0; b < n; ++b) {
      if (a == b) continue;
      const double ea = block.states[static_cast<std::size_t>(a)].energy;
      const double eb = block.states[static_cast<std::size_t>(b)].energy;
      const double flow = transition_rate(model, ea, eb, temperature) * p(a) * (1.0 - p(b));
      d(a) -= flow;
      d(b) += flow;
    }
  return d;
}

}  // namespace detail

// Instantaneous dissipative contribution to d rho / dt for one block.
inline Eigen::MatrixXcd relaxation_term(const RelaxationModel& model, const EigenBlock& block,
                                        const Eigen::MatrixXcd& rho, double temperature) {
  const auto n = rho.rows();
  Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(n, n);
  if (model.kind == RelaxationModel::Kind::None || model.rate == 0.0) return d;
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = 0; b < n; ++b)
      if (a != b) d(a, b) = -0.5 * model.rate * rho(a, b);
  if (model.pauli_blocking) {
    const Eigen::VectorXd p = rho.diagonal().real();
    const Eigen::VectorXd r = detail::pauli_rates(model, block, p, temperature);
    for (Eigen::Index a = 0; a < n; ++a) d(a, a) = r(a);
  } else {
    for (Eigen::Index a = 0; a < n; ++a)
      d(a, a) = -model.rate * (rho(a, a) - block.states[static_cast<std::size_t>(a)].occupation);
  }
  return d;
}

// Exact (or, with Pauli blocking, RK4-substepped) integration of the relaxation term over dt.
inline void apply_relaxation(const RelaxationModel& model, const EigenBlock& block, Eigen::MatrixXcd& rho, double dt,
                             double temperature) {
  if (model.kind == RelaxationModel::Kind::None || model.rate == 0.0) return;
  const auto n = rho.rows();
  const double off = std::exp(-0.5 * model.rate * dt);
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = 0; b < n; ++b)
      if (a != b) rho(a, b) *= off;
  if (!model.pauli_blocking) {
    const double decay = std::exp(-model.rate * dt);
    for (Eigen::Index a = 0; a < n; ++a) {
      const double f = block.states[static_cast<std::size_t>(a)].occupation;
      rho(a, a) = f + (rho(a, a).real() - f) * decay;
    }
    return;
  }
  Eigen::VectorXd p = rho.diagonal().real();
  const int sub = std::max(1, static_cast<int>(std::ceil(model.rate * dt * 20.0)));
  const double h = dt / sub;
  for (int k = 0; k < sub; ++k) {
    const Eigen::VectorXd k1 = detail::pauli_rates(model, block, p, temperature);
    const Eigen::VectorXd k2 = detail::pauli_rates(model, block, p + 0.5 * h * k1, temperature);
    const Eigen::VectorXd k3 = detail::pauli_rates(model, block, p + 0.5 * h * k2, temperature);
    const Eigen::VectorXd k4 = detail::pauli_rates(model, block, p + h * k3, temperature);
    p += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  for (Eigen::Index a = 0; a < n; ++a) rho(a, a) = p(a);
}

struct PropagationOptions {
  double t_start = 0.0;
  double t_end = 0.0;
  double dt = 0.0;        // fixed step [ps]
  int sample_every = 1;   // observer cadence in steps
  double trace_tolerance = 1e-6;
};

// Time step that gives `steps_per_cycle` steps per period of the fastest carrier.
inline double step_for(const PulseTrain& train, int steps_per_cycle) {
  if (steps_per_cycle < 40) throw std::invalid_argument("need at least 40 steps per optical cycle");
  return train.shortest_period() / steps_per_cycle;
}

// Second-order split step: free half step, interaction at the midpoint,
// free half step, then the relaxation factor. Observer is called with the
// initial state and every `sample_every` steps (and at the final step).
template <typename Observer>
void propagate(const EigenBasis& basis, const InteractionModel& interaction, const RelaxationModel& model,
               BlockDensityMatrix& rho, const PropagationOptions& opt, Observer&& observer) {
  model.validate();
  if (!(opt.dt > 0.0)) throw std::invalid_argument("propagate: dt must be > 0");
  if (!interaction.drive().train().segments.empty() &&
      opt.dt > interaction.drive().train().shortest_period() / 40.0 * (1.0 + 1e-12))
    throw std::invalid_argument("propagate: step undersamples the carrier (need >= 40 steps per cycle)");
  if (rho.blocks.size() != basis.blocks.size()) throw std::invalid_argument("propagate: block mismatch");
  if (opt.sample_every < 1) throw std::invalid_argument("propagate: sample_every must be >= 1");

  const double hbar = units::hbar;
  const double trace0 = rho.trace();
  const long steps = std::max(0L, std::lround((opt.t_end - opt.t_start) / opt.dt));
  const std::size_t n_blocks = basis.blocks.size();

  std::vector<Eigen::VectorXcd> half(n_blocks);
  for (std::size_t b = 0; b < n_blocks; ++b) {
    const auto& st = basis.blocks[b].states;
    half[b].resize(static_cast<Eigen::Index>(st.size()));
    for (std::size_t k = 0; k < st.size(); ++k)
      half[b](static_cast<Eigen::Index>(k)) = std::polar(1.0, -st[k].energy * 0.5 * opt.dt / hbar);
  }
  std::vector<std::size_t> owners;
  for (std::size_t b = 0; b < n_blocks; ++b)
    if (interaction.owner(b) == b) owners.push_back(b);

  rho.time = opt.t_start;
  observer(static_cast<const BlockDensityMatrix&>(rho));
  std::vector<Eigen::MatrixXcd> unitary(n_blocks);
  for (long step = 0; step < steps; ++step) {
    const double t = opt.t_start + static_cast<double>(step) * opt.dt;
    const double t_mid = t + 0.5 * opt.dt;
    const bool driven = interaction.drive().train().active(t_mid);
    if (driven) {
#pragma omp parallel for schedule(dynamic)
      for (std::size_t k = 0; k < owners.size(); ++k) {
        const std::size_t b = owners[k];
        const Eigen::MatrixXcd h = interaction.hamiltonian(b, t_mid);
        if (h.size() == 0) {
          unitary[b].resize(0, 0);
          continue;
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
        Eigen::VectorXcd phase(h.rows());
        for (Eigen::Index q = 0; q < h.rows(); ++q) phase(q) = std::polar(1.0, -es.eigenvalues()(q) * opt.dt / hbar);
        unitary[b] = es.eigenvectors() * phase.asDiagonal() * es.eigenvectors().adjoint();
      }
    }
#pragma omp parallel for schedule(dynamic)
    for (std::size_t b = 0; b < n_blocks; ++b) {
      Eigen::MatrixXcd& r = rho.blocks[b];
      if (r.size() == 0) continue;
      const Eigen::VectorXcd& u0 = half[b];
      r = u0.asDiagonal() * r * u0.conjugate().asDiagonal();
      if (driven) {
        const Eigen::MatrixXcd& u = unitary[interaction.owner(b)];
        r = u * r * u.adjoint();
      }
      r = u0.asDiagonal() * r * u0.conjugate().asDiagonal();
      apply_relaxation(model, basis.blocks[b], r, opt.dt, basis.temperature);
      r = 0.5 * (r + r.adjoint()).eval();
    }
    rho.time = t + opt.dt;
    const double drift = std::abs(rho.trace() - trace0);
    if (drift > opt.trace_tolerance) {
      char msg[128];
      std::snprintf(msg, sizeof msg, "propagate: trace drift %.3e at t = %.4f ps", drift, rho.time);
      throw NumericalError(msg);
    }
    if ((step + 1) % opt.sample_every == 0 || step + 1 == steps) observer(static_cast<const BlockDensityMatrix&>(rho));
  }
}

struct DensityMatrixTrajectory {
  std::vector<BlockDensityMatrix> samples;
};

inline DensityMatrixTrajectory propagate(const EigenBasis& basis, const InteractionModel& interaction,
                                         const RelaxationModel& model, BlockDensityMatrix rho,
                                         const PropagationOptions& opt) {
  DensityMatrixTrajectory traj;
  propagate(basis, interaction, model, rho, opt, [&](const BlockDensityMatrix& r) { traj.samples.push_back(r); });
  return traj;
}

// Keeps only coherences between states closer than `window` in energy, i.e.
// the part of rho that free evolution turns by less than window/hbar per unit time.
inline BlockDensityMatrix secular_part(const EigenBasis& basis, const BlockDensityMatrix& rho, double window) {
  BlockDensityMatrix out = rho;
  for (std::size_t b = 0; b < out.blocks.size(); ++b) {
    const auto& st = basis.blocks[b].states;
    auto& r = out.blocks[b];
    for (Eigen::Index i = 0; i < r.rows(); ++i)
      for (Eigen::Index j = 0; j < r.cols(); ++j)
        if (std::abs(st[static_cast<std::size_t>(i)].energy - st[static_cast<std::size_t>(j)].energy) > window)
          r(i, j) = 0.0;
  }
  return out;
}

// Window that drops coherences oscillating near the carrier; used for the
// smooth T(t), M(t) series.
inline double carrier_window(double photon_energy) { return 0.1 * photon_energy; }

// Window for the static part: coherences that turn by less than one radian
// within their own lifetime 2/Gamma. The +l/-l doublets of the torus are split
// by the curvature, so the polar current is only static on this time scale.
inline double static_window(const RelaxationModel& model) {
  if (!(model.rate > 0.0)) throw std::invalid_argument("static_window: needs a relaxation rate > 0");
  return 0.5 * units::hbar * model.rate;
}

// Energy Tr(rho H0) [meV].
inline double band_energy(const EigenBasis& basis, const BlockDensityMatrix& rho) {
  double e = 0.0;
  for (std::size_t b = 0; b < rho.blocks.size(); ++b)
    for (Eigen::Index k = 0; k < rho.blocks[b].rows(); ++k)
      e += rho.blocks[b](k, k).real() * basis.blocks[b].states[static_cast<std::size_t>(k)].energy;
  return e;
}

}  // namespace toroid
