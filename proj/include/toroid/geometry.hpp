#pragma once

// Torus geometry, local (s, alpha, phi) coordinates and the cross-section grid.
//
//   x = (R + s cos(alpha)) cos(phi)
//   y = (R + s cos(alpha)) sin(phi)
//   z = s sin(alpha)

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>

#include "toroid/units.hpp"

namespace toroid {

using Vec3 = std::array<double, 3>;

enum class TorusVariant { Tube, SolidDonut };

struct TorusGeometry {
  double major_radius = 150.0;    // R [nm]
  double minor_radius = 15.0;     // r0 [nm], Tube only
  double shell_thickness = 5.0;   // dr [nm]; radius of the solid cross-section for SolidDonut
  TorusVariant variant = TorusVariant::Tube;
  double well_depth = 500.0;      // V0 [meV]
  double effective_mass = units::default_effective_mass;

  // Radial extent of the well in the local frame.
  double inner_radius() const {
    return variant == TorusVariant::Tube ? minor_radius - 0.5 * shell_thickness : 0.0;
  }
  double outer_radius() const {
    return variant == TorusVariant::Tube ? minor_radius + 0.5 * shell_thickness
                                         : shell_thickness;
  }
  double kinetic_scale() const { return units::hbar2_over_2m(effective_mass); }

  void validate() const {
    if (variant == TorusVariant::Tube) {
      if (!(shell_thickness > 0.0)) throw std::invalid_argument("tube shell thickness must be > 0");
      if (!(inner_radius() >= 0.0))
        throw std::invalid_argument("tube shell extends through the cross-section centre");
    } else if (!(shell_thickness > 0.0)) {
      throw std::invalid_argument("solid donut thickness must be > 0");
    }
    if (!(outer_radius() > 0.0 && major_radius > outer_radius()))
      throw std::invalid_argument("torus self-intersects: need R > r0 + dr/2 > 0");
    if (!(well_depth > 0.0)) throw std::invalid_argument("well depth must be > 0");
    if (!(effective_mass > 0.0)) throw std::invalid_argument("effective mass must be > 0");
  }
};

inline Vec3 torus_to_cartesian(const TorusGeometry& g, double s, double alpha, double phi) {
  if (s < 0.0) throw std::invalid_argument("torus_to_cartesian: s must be >= 0");
  const double rho = g.major_radius + s * std::cos(alpha);
  return {rho * std::cos(phi), rho * std::sin(phi), s * std::sin(alpha)};
}

// Boundary points belong to the well.
inline double confinement_potential(const TorusGeometry& g, double s, double /*alpha*/) {
  return (s >= g.inner_radius() && s <= g.outer_radius()) ? 0.0 : g.well_depth;
}

// Uniform staggered grid on the cross-section: s_i = (i + 1/2) ds, alpha_j = j dalpha.
// The hard wall sits on the outer face s = s_max.
class SectionGrid {
 public:
  SectionGrid() = default;

  SectionGrid(const TorusGeometry& g, std::size_t n_s, std::size_t n_alpha, double s_max)
      : geometry_(g), n_s_(n_s), n_alpha_(n_alpha), s_max_(s_max),
        ds_(s_max / static_cast<double>(n_s)),
        dalpha_(2.0 * units::pi / static_cast<double>(n_alpha)) {}

  const TorusGeometry& geometry() const { return geometry_; }
  std::size_t n_s() const { return n_s_; }
  std::size_t n_alpha() const { return n_alpha_; }
  std::size_t size() const { return n_s_ * n_alpha_; }
  double s_max() const { return s_max_; }
  double ds() const { return ds_; }
  double dalpha() const { return dalpha_; }
  double major_radius() const { return geometry_.major_radius; }

  double s(std::size_t i) const { return (static_cast<double>(i) + 0.5) * ds_; }
  double s_face(std::size_t i) const { return static_cast<double>(i) * ds_; }  // lower face of cell i
  double alpha(std::ptrdiff_t j) const { return static_cast<double>(j) * dalpha_; }

  std::size_t wrap(std::ptrdiff_t j) const {
    const auto n = static_cast<std::ptrdiff_t>(n_alpha_);
    return static_cast<std::size_t>(((j % n) + n) % n);
  }
  std::size_t index(std::size_t i, std::ptrdiff_t j) const { return i * n_alpha_ + wrap(j); }

  // Distance from the torus axis, R + s cos(alpha).
  double rho(std::size_t i, std::ptrdiff_t j) const {
    return geometry_.major_radius + s(i) * std::cos(alpha(j));
  }
  double z(std::size_t i, std::ptrdiff_t j) const { return s(i) * std::sin(alpha(j)); }

  // Volume element per unit phi-angle.
  double weight(std::size_t i, std::ptrdiff_t j) const {
    return s(i) * rho(i, wrap(j)) * ds_ * dalpha_;
  }

  // Potential averaged over the cell with the Jacobian s(R + s cos alpha).
  // Equals the point value when the well edges fall on cell faces.
  double cell_potential(std::size_t i, std::ptrdiff_t j) const {
    const double lo = s_face(i), hi = lo + ds_;
    const double c = std::cos(alpha(j));
    const double rr = geometry_.major_radius;
    auto jac_integral = [&](double a, double b) {
      return rr * 0.5 * (b * b - a * a) + c * (b * b * b - a * a * a) / 3.0;
    };
    const double a = std::max(lo, geometry_.inner_radius());
    const double b = std::min(hi, geometry_.outer_radius());
    const double inside = b > a ? jac_integral(a, b) : 0.0;
    const double total = jac_integral(lo, hi);
    return geometry_.well_depth * (1.0 - inside / total);
  }

 private:
  TorusGeometry geometry_{};
  std::size_t n_s_ = 0;
  std::size_t n_alpha_ = 0;
  double s_max_ = 0.0;
  double ds_ = 0.0;
  double dalpha_ = 0.0;
};

inline SectionGrid build_section_grid(const TorusGeometry& g, std::size_t n_s, std::size_t n_alpha,
                                      double padding = 10.0) {
  g.validate();
  if (n_s < 8 || n_alpha < 8) throw std::invalid_argument("section grid needs n_s, n_alpha >= 8");
  // The s -> -s continuation through the cross-section centre maps alpha to alpha + pi.
  if (n_alpha % 2 != 0) throw std::invalid_argument("n_alpha must be even");
  if (!(padding > 0.0)) throw std::invalid_argument("grid padding must be > 0");
  const double s_max = g.outer_radius() + padding;
  if (!(s_max < g.major_radius))
    throw std::invalid_argument("grid too large: s_max must stay below the major radius");
  const double ds = s_max / static_cast<double>(n_s);
  if (2.0 * ds > g.outer_radius() - g.inner_radius())
    throw std::invalid_argument("grid too coarse to contain the well (need >= 2 radial cells)");
  return SectionGrid(g, n_s, n_alpha, s_max);
}

}  // namespace toroid
