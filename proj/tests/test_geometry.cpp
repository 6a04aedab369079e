#include <gtest/gtest.h>

#include "toroid/geometry.hpp"

using namespace toroid;

TEST(Geometry, RejectsSelfIntersectingTorus) {
  TorusGeometry g;
  g.major_radius = 10.0;
  EXPECT_THROW(g.validate(), std::invalid_argument);
  g = TorusGeometry{};
  g.shell_thickness = 40.0;  // inner radius < 0
  EXPECT_THROW(g.validate(), std::invalid_argument);
  EXPECT_NO_THROW(TorusGeometry{}.validate());
}

TEST(Geometry, SolidDonutExtent) {
  TorusGeometry g;
  g.variant = TorusVariant::SolidDonut;
  g.major_radius = 75.0;
  g.shell_thickness = 20.0;
  EXPECT_DOUBLE_EQ(g.inner_radius(), 0.0);
  EXPECT_DOUBLE_EQ(g.outer_radius(), 20.0);
  EXPECT_NO_THROW(g.validate());
}

TEST(Geometry, CartesianMapping) {
  TorusGeometry g;
  const Vec3 p = torus_to_cartesian(g, 15.0, units::pi / 2.0, units::pi / 2.0);
  EXPECT_NEAR(p[0], 0.0, 1e-12);
  EXPECT_NEAR(p[1], 150.0, 1e-12);
  EXPECT_NEAR(p[2], 15.0, 1e-12);
  EXPECT_THROW(torus_to_cartesian(g, -1.0, 0.0, 0.0), std::invalid_argument);
}

TEST(Geometry, WeightsIntegrateSectionArea) {
  // sum s rho ds dalpha = pi s_max^2 R: the cos(alpha) term cancels on a uniform alpha grid
  TorusGeometry g;
  const SectionGrid grid = build_section_grid(g, 40, 64);
  double acc = 0.0;
  for (std::size_t i = 0; i < grid.n_s(); ++i)
    for (std::size_t j = 0; j < grid.n_alpha(); ++j) acc += grid.weight(i, static_cast<std::ptrdiff_t>(j));
  EXPECT_NEAR(acc / (units::pi * grid.s_max() * grid.s_max() * g.major_radius), 1.0, 1e-12);
}

TEST(Geometry, AlphaWrapsPeriodically) {
  const SectionGrid grid = build_section_grid(TorusGeometry{}, 16, 32);
  EXPECT_EQ(grid.wrap(-1), 31u);
  EXPECT_EQ(grid.wrap(32), 0u);
  EXPECT_EQ(grid.index(2, -1), grid.index(2, 31));
}

TEST(Geometry, PotentialInsideAndOutsideShell) {
  TorusGeometry g;
  const SectionGrid grid = build_section_grid(g, 48, 64);
  // cell centred at s ~ 15 is inside the well, the outermost cell is outside
  std::size_t inside = 0;
  while (grid.s(inside) < g.minor_radius) ++inside;
  EXPECT_DOUBLE_EQ(grid.cell_potential(inside, 0), 0.0);
  EXPECT_DOUBLE_EQ(grid.cell_potential(grid.n_s() - 1, 0), g.well_depth);
}
