#include <gtest/gtest.h>

#include "toroid/probe.hpp"

using namespace toroid;

namespace {

// A = (B z, 0, 0): uniform B along y, so the loop integral over the probe section is -B pi r2^2.
FieldFn uniform_by(double b) {
  return [b](const std::vector<Vec3>& pts) {
    std::vector<Vec3> out;
    for (const auto& p : pts) out.push_back({b * p[2], 0.0, 0.0});
    return out;
  };
}

LoopSamples bumpy_loop(double mean, double ripple, int n = 128) {
  LoopSamples l{15.0, std::vector<double>(static_cast<std::size_t>(n))};
  for (int k = 0; k < n; ++k)
    l.tangential[static_cast<std::size_t>(k)] = mean * (1.0 + ripple * std::cos(2.0 * units::pi * k / n));
  return l;
}

}  // namespace

TEST(Probe, CirculationIsEnclosedFlux) {
  ProbeTorus p;
  const double b = 2e-5;
  const double gamma = polar_flux(uniform_by(b), p);
  EXPECT_NEAR(gamma, units::carrier_charge * (-b * units::pi * 225.0) / (2.0 * units::pi * units::hbar), 1e-12);
}

TEST(Probe, GammaZeroGivesSymmetricOccupation) {
  ProbeTorus p;
  const PolarSpectrum sp = shifted_polar_spectrum(p, 0.0);
  std::map<int, double> f;
  for (const auto& lv : sp.levels) f[lv.l] = lv.occupation;
  for (int l = 1; l <= 12; ++l) EXPECT_DOUBLE_EQ(f[l], f[-l]);
  EXPECT_NEAR(net_polar_quanta(sp), 0.0, 1e-12);
  // roundoff only, compared with the response at a small shift
  EXPECT_LT(std::abs(induced_toroidization(p, sp)),
            1e-10 * std::abs(induced_toroidization(p, shifted_polar_spectrum(p, 0.05))));
}

TEST(Probe, ParabolaVertexAtGamma) {
  ProbeTorus p;
  for (double g : {0.3, -0.45, 2.2}) EXPECT_NEAR(shifted_polar_spectrum(p, g).parabola_vertex(), g, 1e-9);
}

TEST(Probe, IntegerShiftIsPeriodic) {
  ProbeTorus p;
  auto energies = [&](double g) {
    std::vector<double> e;
    for (const auto& lv : shifted_polar_spectrum(p, g).levels) e.push_back(lv.energy);
    std::sort(e.begin(), e.end());
    e.resize(20);
    return e;
  };
  const auto a = energies(0.2), b = energies(1.2);
  for (std::size_t k = 0; k < a.size(); ++k) EXPECT_NEAR(a[k], b[k], 1e-12);
  EXPECT_NEAR(net_polar_quanta(shifted_polar_spectrum(p, 0.2)), net_polar_quanta(shifted_polar_spectrum(p, 1.2)), 1e-9);
}

TEST(Probe, InhomogeneousLoopDependsOnCirculationOnly) {
  ProbeTorus p;
  const PolarSpectrum flat = shifted_polar_spectrum(p, bumpy_loop(1e-3, 0.0));
  const PolarSpectrum bumpy = shifted_polar_spectrum(p, bumpy_loop(1e-3, 0.5));
  EXPECT_NEAR(flat.gamma, bumpy.gamma, 1e-12);
  for (std::size_t k = 0; k < flat.levels.size(); ++k) EXPECT_NEAR(flat.levels[k].energy, bumpy.levels[k].energy, 1e-12);
  // the ripple spreads each state over neighbouring plane waves
  const auto& lv = bumpy.levels[bumpy.levels.size() / 2];
  double total = 0.0;
  for (const auto& [l, w] : lv.weights) total += w;
  EXPECT_NEAR(total, 1.0, 1e-9);
  EXPECT_LT(lv.weights.at(lv.l), 1.0);
}

TEST(Probe, LatticeAgreesWithGaugeSolution) {
  ProbeTorus p;
  const LoopSamples loop = bumpy_loop(2e-3, 0.5, 256);
  const PolarSpectrum sp = shifted_polar_spectrum(p, loop);
  const Eigen::VectorXd e = lattice_polar_energies(p, loop);
  std::vector<double> ref;
  for (const auto& lv : sp.levels) ref.push_back(lv.energy);
  std::sort(ref.begin(), ref.end());
  for (int k = 0; k < 5; ++k) EXPECT_NEAR(e(k), ref[static_cast<std::size_t>(k)], 2e-3 * std::max(1.0, ref[k]));
}

TEST(Probe, MomentSignFollowsGamma) {
  ProbeTorus p;
  const double tp = induced_toroidization(p, shifted_polar_spectrum(p, 0.1));
  const double tm = induced_toroidization(p, shifted_polar_spectrum(p, -0.1));
  EXPECT_NE(tp, 0.0);
  EXPECT_NEAR(tp, -tm, 1e-12 * std::abs(tp));
}

TEST(Probe, SweepUsesHeights) {
  ProbeTorus p;
  const auto sw = probe_sweep(uniform_by(1e-5), p, {30.0, 60.0}, 64);
  ASSERT_EQ(sw.size(), 2u);
  EXPECT_EQ(sw[1].height, 60.0);
  EXPECT_NEAR(sw[0].gamma, sw[1].gamma, 1e-12);  // uniform B: same flux at any height
}

TEST(Probe, RejectsBadInput) {
  ProbeTorus p;
  p.minor_radius = 200.0;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  FieldFn nan_field = [](const std::vector<Vec3>& pts) { return std::vector<Vec3>(pts.size(), Vec3{NAN, 0.0, 0.0}); };
  EXPECT_THROW(sample_loop(nan_field, ProbeTorus{}), std::domain_error);
}
