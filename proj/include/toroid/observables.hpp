#pragma once

// Current density and the moments built from it.
//
// The polar current lives on the faces of the section grid. With real section
// functions phi_n and rho = sum rho_nn' |n><n'| in one m block, the charge per
// time and per radian of phi crossing face f (from -> to) is
//   F_f = (q hbar / m*) c_f sum Im(rho_nn') phi_n(to) phi_n'(from),
// c_f being the stencil coupling (area / distance), so that the discrete
// continuity equation of the undriven dynamics holds exactly. The azimuthal
// component and the density live on the nodes:
//   j_phi = (q hbar m / m* rho) sum Re(rho_nn') phi_n phi_n'
//   j_dia = -(q^2 / m*) A n
// Every drive and every state is phi-symmetric, so phi integrals are analytic
// unless stated otherwise.

#include <Eigen/Dense>
#include <fftw3.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

#include "toroid/dynamics.hpp"
#include "toroid/fields.hpp"
#include "toroid/geometry.hpp"
#include "toroid/spectrum.hpp"
#include "toroid/units.hpp"

namespace toroid {

using Mat3 = std::array<std::array<double, 3>, 3>;

struct CurrentField {
  double time = 0.0;
  Eigen::VectorXd flux;   // per face of section_faces(grid), per radian of phi [e/ps]
  Eigen::VectorXd j_phi;  // per node [e/(nm^2 ps)]
};

inline CurrentField zero_current(const SectionGrid& grid) {
  const auto faces = section_faces(grid);
  return {0.0, Eigen::VectorXd::Zero(faces.size()), Eigen::VectorXd::Zero(static_cast<Eigen::Index>(grid.size()))};
}

namespace detail {

inline Eigen::VectorXd inverse_rho(const SectionGrid& grid) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(grid.size()));
  for (std::size_t i = 0; i < grid.n_s(); ++i)
    for (std::size_t j = 0; j < grid.n_alpha(); ++j) {
      const auto jj = static_cast<std::ptrdiff_t>(j);
      out(static_cast<Eigen::Index>(grid.index(i, jj))) = 1.0 / grid.rho(i, jj);
    }
  return out;
}

inline double paramagnetic_scale(const EigenBasis& basis) {  // q hbar / 2m*
  return units::carrier_charge * basis.geometry.kinetic_scale() / units::hbar;
}
inline double diamagnetic_scale(const EigenBasis& basis) {  // q^2 / m*
  const double q = units::carrier_charge;
  return 2.0 * q * q * basis.geometry.kinetic_scale() / (units::hbar * units::hbar);
}

}  // namespace detail

inline CurrentField current_density(const EigenBasis& basis, const BlockDensityMatrix& rho, const SectionDrive* drive,
                                    double t) {
  const SectionGrid& grid = basis.grid;
  const SectionFaces faces = section_faces(grid);
  const double para = detail::paramagnetic_scale(basis);
  const auto cells = static_cast<Eigen::Index>(grid.size());
  const Eigen::VectorXd inv_rho = detail::inverse_rho(grid);
  CurrentField out = zero_current(grid);
  out.time = t;

  Eigen::VectorXd density = Eigen::VectorXd::Zero(cells);
  for (std::size_t b = 0; b < basis.blocks.size(); ++b) {
    const auto& block = basis.blocks[b];
    if (block.states.empty()) continue;
    const auto& r = rho.blocks[b];
    const Eigen::MatrixXd psi = detail::state_matrix(block, cells);
    const Eigen::MatrixXd psi_im = psi * r.imag().transpose();  // column n: sum_n' Im(rho_nn') phi_n'
    const Eigen::MatrixXd psi_re = psi * r.real().transpose();
    const Eigen::MatrixXd to = gather_rows(psi, faces.to), from_im = gather_rows(psi_im, faces.from);
    out.flux += (2.0 * para) * faces.coupling.cwiseProduct(to.cwiseProduct(from_im).rowwise().sum());
    const Eigen::VectorXd dens = psi.cwiseProduct(psi_re).rowwise().sum();
    density += dens;
    out.j_phi += (2.0 * para * block.m) * dens.cwiseProduct(inv_rho);
  }
  if (drive) {
    const double dia = detail::diamagnetic_scale(basis);
    Eigen::VectorXd face_density(faces.size());
    for (Eigen::Index k = 0; k < faces.size(); ++k)
      face_density(k) = 0.5 * (density(faces.from[static_cast<std::size_t>(k)]) +
                               density(faces.to[static_cast<std::size_t>(k)]));
    for (std::size_t g = 0; g < drive->groups().size(); ++g) {
      const double f = drive->factor(g, t);
      if (f == 0.0) continue;
      out.flux -= (dia * f) *
                  faces.coupling.cwiseProduct(face_projection(drive->groups()[g], faces)).cwiseProduct(face_density);
    }
  }
  return out;
}

// Face fluxes from node values of the local components (analytic test currents).
inline CurrentField current_from_nodes(const SectionGrid& grid, const Eigen::VectorXd& j_s, const Eigen::VectorXd& j_alpha,
                                       const Eigen::VectorXd& j_phi, double t = 0.0) {
  const SectionFaces faces = section_faces(grid);
  const auto cells = static_cast<Eigen::Index>(grid.size());
  Eigen::VectorXd j_rho(cells), j_z(cells);
  for (std::size_t i = 0; i < grid.n_s(); ++i)
    for (std::size_t j = 0; j < grid.n_alpha(); ++j) {
      const auto jj = static_cast<std::ptrdiff_t>(j);
      const auto k = static_cast<Eigen::Index>(grid.index(i, jj));
      const double a = grid.alpha(jj);
      j_rho(k) = j_s(k) * std::cos(a) - j_alpha(k) * std::sin(a);
      j_z(k) = j_s(k) * std::sin(a) + j_alpha(k) * std::cos(a);
    }
  CurrentField out{t, Eigen::VectorXd(faces.size()), j_phi};
  for (Eigen::Index k = 0; k < faces.size(); ++k) {
    const auto a = faces.from[static_cast<std::size_t>(k)], b = faces.to[static_cast<std::size_t>(k)];
    const double dot = 0.5 * ((j_rho(a) + j_rho(b)) * faces.d_rho(k) + (j_z(a) + j_z(b)) * faces.d_z(k));
    out.flux(k) = dot * faces.coupling(k);  // j.n area, n = (r_to - r_from) / distance
  }
  return out;
}

// Node values of the local (s, alpha) components, averaged over the two faces
// of each direction; for exports and plots.
inline std::pair<Eigen::VectorXd, Eigen::VectorXd> node_components(const SectionGrid& grid, const CurrentField& f) {
  const SectionFaces faces = section_faces(grid);
  const auto cells = static_cast<Eigen::Index>(grid.size());
  Eigen::VectorXd j_s = Eigen::VectorXd::Zero(cells), j_a = Eigen::VectorXd::Zero(cells);
  for (Eigen::Index k = 0; k < faces.size(); ++k) {
    const double v = 0.5 * f.flux(k) / faces.area(k);
    Eigen::VectorXd& target = faces.radial[static_cast<std::size_t>(k)] ? j_s : j_a;
    target(faces.from[static_cast<std::size_t>(k)]) += v;
    target(faces.to[static_cast<std::size_t>(k)]) += v;
  }
  return {j_s, j_a};
}

// Net flux leaving each node [e/ps per radian of phi].
inline Eigen::VectorXd flux_divergence(const SectionGrid& grid, const CurrentField& f) {
  const SectionFaces faces = section_faces(grid);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(grid.size()));
  for (Eigen::Index k = 0; k < faces.size(); ++k) {
    out(faces.from[static_cast<std::size_t>(k)]) += f.flux(k);
    out(faces.to[static_cast<std::size_t>(k)]) -= f.flux(k);
  }
  return out;
}

// Populations <l|rho_m|l> of the polar harmonics, one row per block,
// columns l = -l_max..l_max.
struct PolarPopulations {
  int l_max = 0;
  std::vector<int> m;
  Eigen::MatrixXd p;
  double at(std::size_t row, int l) const { return p(static_cast<Eigen::Index>(row), l + l_max); }
};

inline PolarPopulations polar_populations(const EigenBasis& basis, const BlockDensityMatrix& rho, int l_max = 2) {
  const auto cells = static_cast<Eigen::Index>(basis.grid.size());
  PolarPopulations out;
  out.l_max = l_max;
  out.p = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(basis.blocks.size()), 2 * l_max + 1);
  for (std::size_t b = 0; b < basis.blocks.size(); ++b) {
    out.m.push_back(basis.blocks[b].m);
    if (basis.blocks[b].states.empty()) continue;
    const Eigen::MatrixXcd amp =
        polar_amplitudes(basis.grid, detail::state_matrix(basis.blocks[b], cells), basis.reference_radial, l_max);
    // <l|rho|l> = sum c_n rho_nn' conj(c_n')
    const Eigen::MatrixXcd v = amp * rho.blocks[b];
    for (int l = 0; l <= 2 * l_max; ++l)
      out.p(static_cast<Eigen::Index>(b), l) = v.row(l).dot(amp.row(l)).real();
  }
  return out;
}

// Linear functional F[j] = int dV (u . j): per face u(midpoint) . (r_to - r_from),
// per node the azimuthal weight u_phi.
struct LocalWeights {
  Eigen::VectorXd u_face, u_phi;
};

// fn(rho, z) -> (u_rho, u_z, u_phi).
template <typename Fn>
LocalWeights cylindrical_weights(const SectionGrid& grid, Fn&& fn) {
  const SectionFaces faces = section_faces(grid);
  LocalWeights w;
  w.u_face.resize(faces.size());
  for (Eigen::Index k = 0; k < faces.size(); ++k) {
    const std::array<double, 3> u = fn(faces.rho(k), faces.z(k));
    w.u_face(k) = u[0] * faces.d_rho(k) + u[1] * faces.d_z(k);
  }
  w.u_phi.resize(static_cast<Eigen::Index>(grid.size()));
  for (std::size_t i = 0; i < grid.n_s(); ++i)
    for (std::size_t j = 0; j < grid.n_alpha(); ++j) {
      const auto jj = static_cast<std::ptrdiff_t>(j);
      w.u_phi(static_cast<Eigen::Index>(grid.index(i, jj))) = fn(grid.rho(i, jj), grid.z(i, jj))[2];
    }
  return w;
}

// Field integral with the analytic phi integral (2 pi).
inline double integrate_field(const SectionGrid& grid, const CurrentField& f, const LocalWeights& u) {
  const Eigen::VectorXd w = detail::quadrature_weights(grid);
  return 2.0 * units::pi * u.u_face.dot(f.flux) + w.dot(u.u_phi.cwiseProduct(f.j_phi));
}

// A linear functional of the current compiled to per-block matrices, so that a
// time series costs O(n^2) per block and sample.
class ObservableOperator {
 public:
  ObservableOperator() = default;
  ObservableOperator(const EigenBasis& basis, const SectionDrive& drive, const LocalWeights& u) : drive_(&drive) {
    const SectionGrid& grid = basis.grid;
    const SectionFaces faces = section_faces(grid);
    const double para = detail::paramagnetic_scale(basis);
    const double dia = detail::diamagnetic_scale(basis);
    const double two_pi = 2.0 * units::pi;
    const auto cells = static_cast<Eigen::Index>(grid.size());
    const Eigen::VectorXd w = detail::quadrature_weights(grid);
    const Eigen::VectorXd inv_rho = detail::inverse_rho(grid);
    const Eigen::VectorXd uc = (two_pi * 2.0 * para) * u.u_face.cwiseProduct(faces.coupling);
    std::vector<Eigen::VectorXd> ud;
    for (const auto& g : drive.groups())
      ud.push_back((-two_pi * dia) * u.u_face.cwiseProduct(faces.coupling).cwiseProduct(face_projection(g, faces)));

    for (const auto& block : basis.blocks) {
      Blk blk;
      if (!block.states.empty()) {
        const Eigen::MatrixXd psi = detail::state_matrix(block, cells);
        const Eigen::MatrixXd from = gather_rows(psi, faces.from), to = gather_rows(psi, faces.to);
        // (n, n') pairs with Im(rho_nn'): sum_f u_f F_f coefficient of phi_n(to) phi_n'(from)
        blk.imag = to.transpose() * (uc.asDiagonal() * from);
        const Eigen::VectorXd phi_w = (2.0 * para * block.m) * w.cwiseProduct(u.u_phi).cwiseProduct(inv_rho);
        blk.real = psi.transpose() * (phi_w.asDiagonal() * psi);
        for (const auto& d : ud)
          blk.diamagnetic.push_back(0.5 * (from.transpose() * (d.asDiagonal() * from) +
                                           to.transpose() * (d.asDiagonal() * to)));
      }
      blocks_.push_back(std::move(blk));
    }
  }

  double operator()(const BlockDensityMatrix& rho, double t) const {
    std::vector<double> f;
    if (drive_)
      for (std::size_t g = 0; g < drive_->groups().size(); ++g) f.push_back(drive_->factor(g, t));
    return evaluate(rho, f);
  }
  // Value with the fields switched off: drops the diamagnetic part. Equals
  // operator() whenever no pulse is on.
  double field_free(const BlockDensityMatrix& rho) const { return evaluate(rho, {}); }

 private:
  double evaluate(const BlockDensityMatrix& rho, const std::vector<double>& f) const {
    double acc = 0.0;
    for (std::size_t b = 0; b < blocks_.size(); ++b) {
      const Blk& blk = blocks_[b];
      if (blk.imag.size() == 0) continue;
      const auto& r = rho.blocks[b];
      acc += (r.imag().array() * blk.imag.array()).sum();
      Eigen::MatrixXd sym = blk.real;
      for (std::size_t g = 0; g < f.size(); ++g)
        if (f[g] != 0.0) sym += f[g] * blk.diamagnetic[g];
      acc += (r.real().array() * sym.array()).sum();
    }
    return acc;
  }

  struct Blk {
    Eigen::MatrixXd imag, real;
    std::vector<Eigen::MatrixXd> diamagnetic;
  };
  const SectionDrive* drive_ = nullptr;
  std::vector<Blk> blocks_;
};

namespace weights {

// T_z with prefactor 1/(10c): integrand z (rho j_rho + z j_z) - 2 (rho^2 + z^2) j_z.
inline LocalWeights toroidal_z(const SectionGrid& grid) {
  const double pre = 1.0 / (10.0 * units::speed_of_light);
  return cylindrical_weights(grid, [&](double rho, double z) {
    return std::array<double, 3>{pre * z * rho, pre * (z * z - 2.0 * (rho * rho + z * z)), 0.0};
  });
}
// M_phi = (1/2) int (r x j)_phi = (1/2) int (z j_rho - rho j_z).
inline LocalWeights circulating_moment(const SectionGrid& grid) {
  return cylindrical_weights(grid, [](double rho, double z) { return std::array<double, 3>{0.5 * z, -0.5 * rho, 0.0}; });
}
// Net current along z, int j_z dV (electric dipole current).
inline LocalWeights axial_current(const SectionGrid& grid) {
  return cylindrical_weights(grid, [](double, double) { return std::array<double, 3>{0.0, 1.0, 0.0}; });
}
// int j_phi dV over the section (net azimuthal current times 2 pi).
inline LocalWeights azimuthal_current(const SectionGrid& grid) {
  return cylindrical_weights(grid, [](double, double) { return std::array<double, 3>{0.0, 0.0, 1.0}; });
}
// Net polar circulation: int j_alpha dV.
inline LocalWeights polar_current(const SectionGrid& grid) {
  const double rr = grid.major_radius();
  return cylindrical_weights(grid, [rr](double rho, double z) {
    const double a = std::atan2(z, rho - rr);
    return std::array<double, 3>{-std::sin(a), std::cos(a), 0.0};
  });
}
// First moments needed by the radiation expansion: 1/2 int rho j_rho, int z j_z
// and 1/2 int rho j_phi.
inline LocalWeights radial_moment(const SectionGrid& grid) {
  return cylindrical_weights(grid, [](double rho, double) { return std::array<double, 3>{0.5 * rho, 0.0, 0.0}; });
}
inline LocalWeights axial_moment(const SectionGrid& grid) {
  return cylindrical_weights(grid, [](double, double z) { return std::array<double, 3>{0.0, z, 0.0}; });
}
inline LocalWeights azimuthal_moment(const SectionGrid& grid) {
  return cylindrical_weights(grid, [](double rho, double) { return std::array<double, 3>{0.0, 0.0, 0.5 * rho}; });
}

}  // namespace weights

// Cartesian current elements j dV of a phi-symmetric current, phi sampled uniformly.
struct CurrentSamples {
  std::vector<Vec3> position, element;
};

inline CurrentSamples sample_current(const SectionGrid& grid, const CurrentField& f, int n_phi, double threshold = 0.0) {
  const SectionFaces faces = section_faces(grid);
  const Eigen::VectorXd w = detail::node_weights(grid);
  const double dphi = 2.0 * units::pi / n_phi;
  Eigen::VectorXd face_mag(faces.size()), node_mag(static_cast<Eigen::Index>(grid.size()));
  for (Eigen::Index k = 0; k < faces.size(); ++k)
    face_mag(k) = std::abs(f.flux(k)) * std::hypot(faces.d_rho(k), faces.d_z(k));
  node_mag = w.cwiseProduct(f.j_phi).cwiseAbs();
  const double cut = threshold * std::max(face_mag.maxCoeff(), node_mag.maxCoeff());
  CurrentSamples out;
  for (int p = 0; p < n_phi; ++p) {
    const double c = std::cos(p * dphi), s = std::sin(p * dphi);
    for (Eigen::Index k = 0; k < faces.size(); ++k) {
      if (face_mag(k) <= cut) continue;
      const double e = f.flux(k) * dphi;
      out.position.push_back({faces.rho(k) * c, faces.rho(k) * s, faces.z(k)});
      out.element.push_back({e * faces.d_rho(k) * c, e * faces.d_rho(k) * s, e * faces.d_z(k)});
    }
    for (std::size_t i = 0; i < grid.n_s(); ++i)
      for (std::size_t j = 0; j < grid.n_alpha(); ++j) {
        const auto jj = static_cast<std::ptrdiff_t>(j);
        const auto k = static_cast<Eigen::Index>(grid.index(i, jj));
        if (node_mag(k) <= cut) continue;
        const double e = w(k) * f.j_phi(k) * dphi, rho = grid.rho(i, jj);
        out.position.push_back({rho * c, rho * s, grid.z(i, jj)});
        out.element.push_back({-e * s, e * c, 0.0});
      }
  }
  return out;
}

// T = 1/(10c) int [r (r.j) - 2 r^2 j] by direct phi quadrature.
inline Vec3 toroidal_moment(const SectionGrid& grid, const CurrentField& f, int n_phi = 64) {
  const CurrentSamples s = sample_current(grid, f, n_phi);
  Vec3 t{0.0, 0.0, 0.0};
  for (std::size_t k = 0; k < s.position.size(); ++k) {
    const Vec3& r = s.position[k];
    const Vec3& j = s.element[k];
    const double rj = r[0] * j[0] + r[1] * j[1] + r[2] * j[2];
    const double r2 = r[0] * r[0] + r[1] * r[1] + r[2] * r[2];
    for (int c = 0; c < 3; ++c) t[c] += r[c] * rj - 2.0 * r2 * j[c];
  }
  for (auto& v : t) v /= 10.0 * units::speed_of_light;
  return t;
}

inline double magnetic_moment(const SectionGrid& grid, const CurrentField& f) {
  return integrate_field(grid, f, weights::circulating_moment(grid));
}

// Magnetic quadrupole Q_ab = 1/(3c) int [(r x j)_a r_b + r_a (r x j)_b], phi by quadrature.
inline Mat3 quadrupole_moment(const SectionGrid& grid, const CurrentField& f, int n_phi = 64) {
  const CurrentSamples s = sample_current(grid, f, n_phi);
  Mat3 q{};
  for (std::size_t k = 0; k < s.position.size(); ++k) {
    const Vec3& r = s.position[k];
    const Vec3& j = s.element[k];
    const Vec3 m{r[1] * j[2] - r[2] * j[1], r[2] * j[0] - r[0] * j[2], r[0] * j[1] - r[1] * j[0]};
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) q[a][b] += m[a] * r[b] + r[a] * m[b];
  }
  for (auto& row : q)
    for (auto& v : row) v /= 3.0 * units::speed_of_light;
  return q;
}

inline double frobenius(const Mat3& m) {
  double acc = 0.0;
  for (const auto& row : m)
    for (double v : row) acc += v * v;
  return std::sqrt(acc);
}

struct BiotSavartOptions {
  int n_phi = 128;
  double softening = 0.0;  // nm; 0 = bare kernel
};

// Half the diagonal of a grid cell at the outer edge of the section.
inline double default_softening(const SectionGrid& grid) {
  const double ds = grid.ds(), arc = grid.s_max() * grid.dalpha();
  return 0.5 * std::hypot(ds, arc);
}

// A(r) = mu0/4pi int j(r') / |r - r'| dr' [mV ps/nm].
inline std::vector<Vec3> biot_savart(const SectionGrid& grid, const CurrentField& f, const std::vector<Vec3>& points,
                                     const BiotSavartOptions& opt = {}) {
  if (opt.n_phi < 128) throw std::invalid_argument("biot_savart: need n_phi >= 128");
  const CurrentSamples s = sample_current(grid, f, opt.n_phi, 1e-14);
  const double guard = default_softening(grid);
  const double eps2 = opt.softening * opt.softening;
  std::vector<Vec3> out(points.size(), Vec3{0.0, 0.0, 0.0});
#pragma omp parallel for schedule(static)
  for (std::size_t p = 0; p < points.size(); ++p) {
    const Vec3& x = points[p];
    double ax = 0.0, ay = 0.0, az = 0.0;
    double nearest = INFINITY;
    for (std::size_t k = 0; k < s.position.size(); ++k) {
      const double dx = x[0] - s.position[k][0], dy = x[1] - s.position[k][1], dz = x[2] - s.position[k][2];
      const double d2 = dx * dx + dy * dy + dz * dz;
      nearest = std::min(nearest, d2);
      const double inv = 1.0 / std::sqrt(d2 + eps2);
      ax += s.element[k][0] * inv;
      ay += s.element[k][1] * inv;
      az += s.element[k][2] * inv;
    }
    if (opt.softening == 0.0 && std::sqrt(nearest) < guard) {
      ax = ay = az = NAN;  // flagged below; exceptions cannot leave the parallel region
    }
    out[p] = {units::mu0_over_4pi * ax, units::mu0_over_4pi * ay, units::mu0_over_4pi * az};
  }
  for (const auto& a : out)
    if (std::isnan(a[0])) throw std::domain_error("biot_savart: evaluation point inside an unsoftened source cell");
  return out;
}

// Moments entering the far-field radiation expansion, sampled on a uniform time grid.
struct RadiationSource {
  std::vector<double> times;
  std::vector<Vec3> current;     // int j dV
  std::vector<Mat3> moment;      // int r_a j_b dV
};

// Builds J and the first-moment tensor from the phi-symmetric scalar series
// J_z, (1/2) int rho j_rho, int z j_z and the azimuthal moment (1/2) int rho j_phi.
inline void push_radiation_sample(RadiationSource& src, double t, double j_z, double half_rho_j_rho, double z_j_z,
                                  double half_rho_j_phi) {
  src.times.push_back(t);
  src.current.push_back({0.0, 0.0, j_z});
  Mat3 m{};
  // phi integrals: int x j_x = int y j_y = pi sum rho j_rho W = (1/2) int rho j_rho dV, etc.
  m[0][0] = half_rho_j_rho;
  m[1][1] = half_rho_j_rho;
  m[2][2] = z_j_z;
  m[0][1] = half_rho_j_phi;   // int x j_y
  m[1][0] = -half_rho_j_phi;  // int y j_x
  src.moment.push_back(m);
}

struct RadiatedField {
  Vec3 a{}, e{}, b{};
};

// First-order retardation: A(r, t) = mu0/(4 pi r) [J(t_r) + (n . dM/dt)(t_r) / c], t_r = t - r/c.
inline RadiatedField radiated_fields(const RadiationSource& src, const Vec3& point, double t) {
  const double r = std::sqrt(point[0] * point[0] + point[1] * point[1] + point[2] * point[2]);
  if (!(r > 0.0)) throw std::invalid_argument("radiated_fields: point at the origin");
  const Vec3 n{point[0] / r, point[1] / r, point[2] / r};
  const double c = units::speed_of_light;
  const std::size_t count = src.times.size();
  if (count < 3) throw std::invalid_argument("radiated_fields: series too short");
  const double dt = (src.times.back() - src.times.front()) / static_cast<double>(count - 1);
  const double tr = t - r / c;
  const double pos = (tr - src.times.front()) / dt;
  if (pos < 1.0 || pos > static_cast<double>(count) - 3.0)
    throw std::out_of_range("radiated_fields: insufficient history for the retarded time");

  auto potential_at = [&](std::size_t k) {
    Vec3 a = src.current[k];
    const std::size_t lo = k == 0 ? 0 : k - 1, hi = std::min(count - 1, k + 1);
    const double span = src.times[hi] - src.times[lo];
    for (int b = 0; b < 3; ++b) {
      double dm = 0.0;
      for (int q = 0; q < 3; ++q) dm += n[q] * (src.moment[hi][q][b] - src.moment[lo][q][b]) / span;
      a[b] += dm / c;
    }
    for (auto& v : a) v *= units::mu0_over_4pi / r;
    return a;
  };
  const auto k0 = static_cast<std::size_t>(std::floor(pos));
  const double frac = pos - static_cast<double>(k0);
  const Vec3 a0 = potential_at(k0 - 1), a1 = potential_at(k0), a2 = potential_at(k0 + 1), a3 = potential_at(k0 + 2);
  RadiatedField out;
  for (int b = 0; b < 3; ++b) {
    out.a[b] = (1.0 - frac) * a1[b] + frac * a2[b];
    const double d1 = (a2[b] - a0[b]) / (2.0 * dt), d2 = (a3[b] - a1[b]) / (2.0 * dt);
    out.e[b] = -((1.0 - frac) * d1 + frac * d2);
  }
  // B = -(1/c) n x dA/dt = (1/c) n x E
  out.b = {(n[1] * out.e[2] - n[2] * out.e[1]) / c, (n[2] * out.e[0] - n[0] * out.e[2]) / c,
           (n[0] * out.e[1] - n[1] * out.e[0]) / c};
  return out;
}

// Transverse (theta) component of a vector at direction (theta, phi).
inline double theta_component(const Vec3& v, double theta, double phi) {
  return v[0] * std::cos(theta) * std::cos(phi) + v[1] * std::cos(theta) * std::sin(phi) - v[2] * std::sin(theta);
}

// Radial Poynting flux n.S = n.(E x B)/mu0 [internal units].
inline double radial_poynting(const RadiatedField& f, const Vec3& point) {
  const double r = std::sqrt(point[0] * point[0] + point[1] * point[1] + point[2] * point[2]);
  const Vec3 s{f.e[1] * f.b[2] - f.e[2] * f.b[1], f.e[2] * f.b[0] - f.e[0] * f.b[2], f.e[0] * f.b[1] - f.e[1] * f.b[0]};
  const double mu0 = 4.0 * units::pi * units::mu0_over_4pi;
  return (s[0] * point[0] + s[1] * point[1] + s[2] * point[2]) / (r * mu0);
}

enum class Window { Hann, Rectangular };

struct Spectrum {
  std::vector<double> frequency;  // angular [rad/ps]
  std::vector<double> magnitude;  // |X_k|, k = 0 .. n/2
};

inline Spectrum fourier_spectrum(const std::vector<double>& times, const std::vector<double>& values,
                                 Window window = Window::Hann) {
  const std::size_t n = values.size();
  if (n < 2 || times.size() != n) throw std::invalid_argument("fourier_spectrum: need >= 2 matching samples");
  const double dt = (times.back() - times.front()) / static_cast<double>(n - 1);
  for (std::size_t k = 1; k < n; ++k)
    if (std::abs(times[k] - times[k - 1] - dt) > 1e-9 * std::max(1.0, std::abs(dt)))
      throw std::invalid_argument("fourier_spectrum: non-uniform time grid");
  std::vector<double> in(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double w = window == Window::Hann ? 0.5 - 0.5 * std::cos(2.0 * units::pi * k / static_cast<double>(n)) : 1.0;
    in[k] = values[k] * w;
  }
  std::vector<fftw_complex> out(n / 2 + 1);
  fftw_plan plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), in.data(), out.data(), FFTW_ESTIMATE);
  fftw_execute(plan);
  fftw_destroy_plan(plan);
  Spectrum s;
  for (std::size_t k = 0; k <= n / 2; ++k) {
    s.frequency.push_back(2.0 * units::pi * static_cast<double>(k) / (static_cast<double>(n) * dt));
    s.magnitude.push_back(std::hypot(out[k][0], out[k][1]));
  }
  return s;
}

// Boxcar over one period on a uniform grid; output times are window centres.
inline std::pair<std::vector<double>, std::vector<double>> cycle_average(const std::vector<double>& times,
                                                                         const std::vector<double>& values,
                                                                         double period) {
  if (times.size() < 2 || times.size() != values.size()) throw std::invalid_argument("cycle_average: bad series");
  const double dt = times[1] - times[0];
  const auto w = static_cast<std::size_t>(std::lround(period / dt));
  if (w < 2 || w > times.size()) throw std::invalid_argument("cycle_average: period not resolved by the series");
  std::vector<double> t, v;
  double acc = 0.0;
  for (std::size_t k = 0; k < w; ++k) acc += values[k];
  for (std::size_t k = 0;; ++k) {
    t.push_back(times[k] + 0.5 * static_cast<double>(w - 1) * dt);
    v.push_back(acc / static_cast<double>(w));
    if (k + w >= times.size()) break;
    acc += values[k + w] - values[k];
  }
  return {t, v};
}

}  // namespace toroid
