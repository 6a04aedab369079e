#pragma once

// Grid-level helpers shared by dynamics and observables: the face list of the
// section grid and the drive fields sampled on the cross-section at phi = 0 (every drive is
// cylindrically symmetric).

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <vector>

#include "toroid/geometry.hpp"
#include "toroid/pulses.hpp"
#include "toroid/units.hpp"

namespace toroid {

// Interior faces of the section grid. Couplings are the ones of the Hamiltonian
// stencil, so fluxes built on them satisfy the discrete continuity equation.
// Per-radian quantities still need the factor 2 pi of the analytic phi integral.
struct SectionFaces {
  std::vector<Eigen::Index> from, to;
  std::vector<char> radial;      // 1: s-face (i -> i+1), 0: alpha-face (j -> j+1)
  Eigen::VectorXd area;          // per radian of phi [nm^2]
  Eigen::VectorXd coupling;      // area / node distance [nm]
  Eigen::VectorXd rho, z;        // face midpoint
  Eigen::VectorXd d_rho, d_z;    // r_to - r_from
  Eigen::Index size() const { return area.size(); }
};

inline SectionFaces section_faces(const SectionGrid& grid) {
  const double rr = grid.major_radius(), ds = grid.ds(), da = grid.dalpha();
  const auto n_a = static_cast<std::ptrdiff_t>(grid.n_alpha());
  struct Row { Eigen::Index from, to; char radial; double area, coupling, rho, z, d_rho, d_z; };
  std::vector<Row> rows;
  rows.reserve(2 * grid.size());
  for (std::size_t i = 0; i < grid.n_s(); ++i)
    for (std::ptrdiff_t j = 0; j < n_a; ++j) {
      const auto k = static_cast<Eigen::Index>(grid.index(i, j));
      const double a = grid.alpha(j), s = grid.s(i);
      if (i + 1 < grid.n_s()) {
        const double sf = grid.s_face(i + 1), rho = rr + sf * std::cos(a);
        const double area = sf * rho * da;
        rows.push_back({k, static_cast<Eigen::Index>(grid.index(i + 1, j)), 1, area, area / ds, rho,
                        sf * std::sin(a), ds * std::cos(a), ds * std::sin(a)});
      }
      const double am = a + 0.5 * da, rho = rr + s * std::cos(am);
      const double area = rho * ds;
      rows.push_back({k, static_cast<Eigen::Index>(grid.index(i, j + 1)), 0, area, area / (s * da), rho,
                      s * std::sin(am), s * (std::cos(a + da) - std::cos(a)), s * (std::sin(a + da) - std::sin(a))});
    }
  SectionFaces f;
  const auto n = static_cast<Eigen::Index>(rows.size());
  f.area.resize(n), f.coupling.resize(n), f.rho.resize(n), f.z.resize(n), f.d_rho.resize(n), f.d_z.resize(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const Row& r = rows[static_cast<std::size_t>(k)];
    f.from.push_back(r.from);
    f.to.push_back(r.to);
    f.radial.push_back(r.radial);
    f.area(k) = r.area, f.coupling(k) = r.coupling, f.rho(k) = r.rho, f.z(k) = r.z;
    f.d_rho(k) = r.d_rho, f.d_z(k) = r.d_z;
  }
  return f;
}

// Rows of a node-major matrix gathered at the from / to end of every face.
inline Eigen::MatrixXd gather_rows(const Eigen::MatrixXd& m, const std::vector<Eigen::Index>& idx) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(idx.size()), m.cols());
  for (std::size_t k = 0; k < idx.size(); ++k) out.row(static_cast<Eigen::Index>(k)) = m.row(idx[k]);
  return out;
}

// Drive fields grouped by spatial profile. All CVB segments with equal waist and
// wavelength share one profile; every linear segment shares the uniform z profile.
struct FieldGroup {
  PulseKind kind = PulseKind::LinearZ;
  PulseSegment profile;                // spatial parameters only
  std::vector<std::size_t> segments;   // indices into the train
  Eigen::VectorXd a_s, a_alpha;        // unit-amplitude local components per node
  Eigen::VectorXd a_rho, a_z;          // same field, cylindrical components
  Eigen::VectorXd divergence;          // unit-amplitude div A per node [1/nm]
};

// (A(from) + A(to))/2 . (r_to - r_from) per face, unit amplitude [nm].
inline Eigen::VectorXd face_projection(const FieldGroup& g, const SectionFaces& f) {
  Eigen::VectorXd out(f.size());
  for (Eigen::Index k = 0; k < f.size(); ++k) {
    const auto a = f.from[static_cast<std::size_t>(k)], b = f.to[static_cast<std::size_t>(k)];
    out(k) = 0.5 * ((g.a_rho(a) + g.a_rho(b)) * f.d_rho(k) + (g.a_z(a) + g.a_z(b)) * f.d_z(k));
  }
  return out;
}

class SectionDrive {
 public:
  SectionDrive() = default;
  SectionDrive(const SectionGrid& grid, const PulseTrain& train) : train_(train) {
    for (std::size_t k = 0; k < train.segments.size(); ++k) {
      const PulseSegment& seg = train.segments[k];
      seg.validate();
      FieldGroup* target = nullptr;
      for (auto& g : groups_) {
        if (g.kind != seg.kind) continue;
        if (seg.kind == PulseKind::LinearZ ||
            (g.profile.waist == seg.waist && g.profile.host_wavelength == seg.host_wavelength)) {
          target = &g;
          break;
        }
      }
      if (!target) {
        groups_.push_back(make_group(grid, seg));
        target = &groups_.back();
      }
      target->segments.push_back(k);
    }
  }

  const std::vector<FieldGroup>& groups() const { return groups_; }
  const PulseTrain& train() const { return train_; }

  // Sum of amplitude * time factor over the segments of group g.
  double factor(std::size_t g, double t) const {
    double f = 0.0;
    for (auto k : groups_[g].segments) f += train_.segments[k].amplitude * train_.segments[k].time_factor(t);
    return f;
  }
  double derivative(std::size_t g, double t) const {
    double f = 0.0;
    for (auto k : groups_[g].segments) f += train_.segments[k].amplitude * train_.segments[k].time_derivative(t);
    return f;
  }
  // Sum of amplitude * integral of the time factor (drives the Lorenz scalar potential).
  double integrated(std::size_t g, double t) const {
    double f = 0.0;
    for (auto k : groups_[g].segments)
      f += train_.segments[k].amplitude * integrated_time_factor(train_.segments[k], t);
    return f;
  }

 private:
  static FieldGroup make_group(const SectionGrid& grid, const PulseSegment& seg) {
    FieldGroup g;
    g.kind = seg.kind;
    g.profile = seg;
    const auto n = static_cast<Eigen::Index>(grid.size());
    g.a_s.resize(n);
    g.a_alpha.resize(n);
    g.a_rho.resize(n);
    g.a_z.resize(n);
    g.divergence.resize(n);
    for (std::size_t i = 0; i < grid.n_s(); ++i)
      for (std::size_t j = 0; j < grid.n_alpha(); ++j) {
        const auto jj = static_cast<std::ptrdiff_t>(j);
        const auto k = static_cast<Eigen::Index>(grid.index(i, jj));
        const double a = grid.alpha(jj);
        double a_rho = 0.0, a_z = 1.0, div = 0.0;
        if (seg.kind == PulseKind::RadialCVB) {
          const CvbProfile p = cvb_profile(seg, grid.rho(i, jj), grid.z(i, jj));
          a_rho = p.radial;
          a_z = 0.0;
          div = p.divergence;
        }
        g.a_s(k) = a_rho * std::cos(a) + a_z * std::sin(a);
        g.a_alpha(k) = -a_rho * std::sin(a) + a_z * std::cos(a);
        g.a_rho(k) = a_rho;
        g.a_z(k) = a_z;
        g.divergence(k) = div;
      }
    return g;
  }

  PulseTrain train_;
  std::vector<FieldGroup> groups_;
};

}  // namespace toroid
