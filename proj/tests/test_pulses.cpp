#include <gtest/gtest.h>

#include "toroid/pulses.hpp"

using namespace toroid;

TEST(Pulses, CvbNormalisedAtPeak) {
  PulseSegment s;
  const double peak = s.waist / std::sqrt(2.0);
  EXPECT_NEAR(cvb_profile(s, peak, 0.0).radial, 1.0, 1e-12);
  EXPECT_LT(cvb_profile(s, peak * 0.99, 0.0).radial, 1.0);
  EXPECT_LT(cvb_profile(s, peak * 1.01, 0.0).radial, 1.0);
}

TEST(Pulses, CvbRatioAtTorusRadiusFrozen) {
  PulseSegment s;
  EXPECT_NEAR(cvb_profile(s, 150.0, 0.0).radial, 0.0873, 2e-4);
}

TEST(Pulses, DivergenceMatchesFiniteDifference) {
  PulseSegment s;
  for (double rho : {100.0, 150.0, 2500.0}) {
    const double h = 1e-3;
    const double fd = ((rho + h) * cvb_profile(s, rho + h, 0.0).radial - (rho - h) * cvb_profile(s, rho - h, 0.0).radial) /
                      (2.0 * h * rho);
    EXPECT_NEAR(cvb_profile(s, rho, 0.0).divergence, fd, 1e-8 * std::max(1.0, std::abs(fd)));
  }
}

TEST(Pulses, TimeFactorVanishesOutsideWindow) {
  PulseSegment s;
  s.start_time = 1.0;
  EXPECT_EQ(s.time_factor(0.5), 0.0);
  EXPECT_EQ(s.time_factor(s.end_time() + 0.1), 0.0);
  EXPECT_NEAR(s.duration(), 2.0 * 2.0 * units::pi * units::hbar / 2.5, 1e-12);
}

TEST(Pulses, TimeDerivativeConsistent) {
  PulseSegment s;
  const double h = 1e-6;
  for (double t : {0.3, 0.9, 1.4, 2.7}) {
    const double fd = (s.time_factor(t + h) - s.time_factor(t - h)) / (2.0 * h);
    EXPECT_NEAR(s.time_derivative(t), fd, 1e-5);
  }
}

TEST(Pulses, AmplitudeFromField) {
  // 600 V/cm at 2.5 meV
  EXPECT_NEAR(amplitude_from_field(0.06, 2.5), 0.06 * units::hbar / 2.5, 1e-15);
}

namespace {
double loop_area(SequenceKind kind) {
  PulseSegment cvb, lin;
  cvb.amplitude = 1.0;
  lin.amplitude = cvb_profile(cvb, 150.0, 0.0).radial;
  PulseTrain train;
  train.segments = pulse_pair(kind, 0.0, cvb, lin);
  train.sort();
  std::vector<std::array<double, 2>> path;
  for (int k = 0; k <= 4000; ++k) path.push_back(combined_local_field(train, 150.0, train.end_time() * k / 4000.0));
  return signed_loop_area(path);
}
}  // namespace

TEST(Pulses, SequencesHaveOppositeHandedness) {
  const double a1 = loop_area(SequenceKind::PS_I), a2 = loop_area(SequenceKind::PS_II);
  EXPECT_GT(a1, 0.0);
  EXPECT_LT(a2, 0.0);
}

TEST(Pulses, PairTiming) {
  PulseSegment cvb, lin;
  const auto p1 = pulse_pair(SequenceKind::PS_I, 2.0, cvb, lin);
  EXPECT_EQ(p1[0].kind, PulseKind::RadialCVB);
  EXPECT_NEAR(p1[1].start_time - p1[0].start_time, 0.25 * cvb.period(), 1e-12);
  const auto p2 = pulse_pair(SequenceKind::PS_II, 2.0, cvb, lin);
  EXPECT_EQ(p2[0].kind, PulseKind::LinearZ);
}

TEST(Pulses, ValidateRejectsBadInput) {
  PulseSegment s;
  s.amplitude = -1.0;
  EXPECT_THROW(s.validate(), std::invalid_argument);
  s = PulseSegment{};
  s.photon_energy = 0.0;
  EXPECT_THROW(s.validate(), std::invalid_argument);
}
