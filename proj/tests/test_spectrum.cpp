#include <gtest/gtest.h>

#include "toroid/oracles.hpp"
#include "toroid/spectrum.hpp"

using namespace toroid;

namespace {

const EigenBasis& default_basis() {
  static const EigenBasis b = [] {
    const SectionGrid grid = build_section_grid(TorusGeometry{}, 48, 64);
    BasisSpec spec;
    spec.m_max = 12;
    return build_basis(grid, spec);
  }();
  return b;
}

double lowest_with_l(const EigenBlock& block, int l) {
  for (const auto& s : block.states)
    if (dominant_polar(s.l_weights).first == l) return s.energy;
  return NAN;
}

}  // namespace

TEST(Spectrum, PresymmetrizationResidualSmall) {
  const SectionGrid grid = build_section_grid(TorusGeometry{}, 48, 64);
  for (int m : {0, 5, 20}) EXPECT_LT(assemble_hamiltonian(grid, m).presymmetrization_residual, 1e-6) << m;
}

TEST(Spectrum, PlusMinusMDegenerate) {
  const EigenBasis& b = default_basis();
  for (int m = 1; m <= 12; ++m) {
    const auto* p = b.block(m);
    const auto* n = b.block(-m);
    ASSERT_EQ(p->states.size(), n->states.size());
    for (std::size_t k = 0; k < p->states.size(); ++k) EXPECT_DOUBLE_EQ(p->states[k].energy, n->states[k].energy);
  }
}

TEST(Spectrum, AzimuthalLadderFollowsRing) {
  const EigenBasis& b = default_basis();
  const double e0 = b.block(0)->states.front().energy;
  const double e1 = b.block(1)->states.front().energy;
  // effective radius sits slightly above R, so the spacing is close to the ring value
  EXPECT_NEAR((e1 - e0) / oracles::ring_spectrum(150.0, 1.0), 1.0, 0.1);
}

TEST(Spectrum, PolarSpacingNearPhotonEnergy) {
  const EigenBasis& b = default_basis();
  const double gap = lowest_with_l(*b.block(0), 1) - lowest_with_l(*b.block(0), 0);
  EXPECT_NEAR(gap, 2.5, 0.15 * 2.5);
}

TEST(Spectrum, LowBandIsPolarGround) {
  const EigenBasis& b = default_basis();
  for (int m : {0, 4, 8}) {
    const auto w = b.block(m)->states.front().l_weights;
    EXPECT_GE(w.at(0), 0.9) << "m = " << m;
  }
}

TEST(Spectrum, OccupationsSumToElectronCount) {
  const EigenBasis& b = default_basis();
  double n = 0.0;
  for (const auto& blk : b.blocks)
    for (const auto& s : blk.states) {
      EXPECT_GE(s.occupation, 0.0);
      EXPECT_LE(s.occupation, 1.0);
      n += s.occupation;
    }
  EXPECT_NEAR(n, 19.0, 1e-9);
  EXPECT_GT(b.cutoff, b.fermi_level);
}

TEST(Spectrum, EigenvectorsNormalised) {
  const EigenBasis& b = default_basis();
  for (const auto& s : b.block(3)->states) EXPECT_NEAR(state_norm2(b.grid, s.psi), 1.0, 1e-9);
}

TEST(Spectrum, SecondOrderConvergence) {
  // face-aligned grids; reference by Richardson extrapolation from the two finest
  auto e0 = [](std::size_t n_s, std::size_t n_a) {
    const SectionGrid grid = build_section_grid(TorusGeometry{}, n_s, n_a);
    return solve_spectrum(grid, 0, ground_level(grid) + 5.0).block(0)->states.front().energy;
  };
  const double a = e0(44, 64), b = e0(88, 128), c = e0(176, 256), d = e0(352, 512);
  const double ref = d + (d - c) / 3.0;
  EXPECT_NEAR((a - ref) / (b - ref), 4.0, 0.5);
  EXPECT_NEAR((b - ref) / (c - ref), 4.0, 0.5);
}
