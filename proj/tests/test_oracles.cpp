#include <gtest/gtest.h>

#include "toroid/oracles.hpp"

using namespace toroid;
using namespace toroid::oracles;

TEST(Oracles, RingSpectrumFrozen) {
  // hbar^2/(2 m*) / radius^2 with m* = 0.067 m_e
  EXPECT_NEAR(ring_spectrum(150.0, 1.0), 0.025273, 2e-6);
  EXPECT_NEAR(ring_spectrum(15.0, 1.0), 2.5273, 2e-4);
  EXPECT_NEAR(ring_spectrum(15.0, 2.0) - ring_spectrum(15.0, 1.0), 3.0 * 2.5273, 1e-3);
  EXPECT_THROW(ring_spectrum(0.0, 1.0), std::invalid_argument);
}

TEST(Oracles, OnAxisMatchesFarFieldAlongAxis) {
  const AnalyticThinTorus t;
  const double z = 20.0 * t.major_radius;
  const double far = static_far_potential(t, z, 0.0).a_r;
  EXPECT_NEAR(on_axis_potential(t, z) / far, 1.0, 0.01);
}

TEST(Oracles, FarFieldAngularShape) {
  const AnalyticThinTorus t;
  const double r = 8.0 * t.major_radius;
  const auto a = static_far_potential(t, r, units::pi / 2.0);
  EXPECT_NEAR(a.a_r, 0.0, 1e-20);
  EXPECT_LT(a.a_theta, 0.0);  // same sign as T_z
  const auto b = static_far_potential(t, 2.0 * r, units::pi / 2.0);
  EXPECT_NEAR(a.a_theta / b.a_theta, 8.0, 1e-12);
  EXPECT_THROW(static_far_potential(t, 4.0 * t.major_radius, 0.0), std::domain_error);
}

TEST(Oracles, ToroidalMomentThinTorus) {
  const AnalyticThinTorus t{150.0, 15.0, 2.0};
  const double v = 2.0 * units::pi * units::pi * 15.0 * 15.0 * 150.0;
  EXPECT_NEAR(toroidal_moment(t), -v * 2.0 / (4.0 * units::pi * units::speed_of_light), 1e-15);
  // same thing written through the minor and major radii
  EXPECT_NEAR(toroidal_moment(t), -units::pi * 150.0 * 15.0 * 15.0 * 2.0 / (2.0 * units::speed_of_light), 1e-12);
  EXPECT_NEAR(circulating_moment(t), -units::pi * 225.0 * 2.0, 1e-12);
}

TEST(Oracles, RadiatedPatternValidity) {
  EXPECT_NEAR(radiated_pattern(1e-4, 100.0, units::pi / 2.0, 150.0), 1e-12 / 100.0, 1e-24);
  EXPECT_NEAR(radiated_pattern(1e-4, 100.0, 0.0, 150.0), 0.0, 1e-30);
  EXPECT_THROW(radiated_pattern(1e-3, 100.0, 1.0, 150.0), std::domain_error);
}
