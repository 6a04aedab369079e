#include <gtest/gtest.h>

#include "toroid/experiments.hpp"

using namespace toroid;

namespace {

const Prepared& small() {
  static const Prepared p = [] {
    Scenario sc;
    sc.basis.m_max = 8;
    return prepare(sc, 5.0);
  }();
  return p;
}

PulseTrain ps_train(SequenceKind kind, double field_v_per_cm) {
  PulseConfig pc;
  pc.schedule = {kind};
  return make_train(pc, field_v_per_cm * units::volt_per_cm, 150.0);
}

BlockDensityMatrix evolve(const PulseTrain& train, const RelaxationModel& rm, double t_end) {
  const EigenBasis& b = small().basis;
  InteractionModel im(b, train);
  PropagationOptions po;
  po.t_end = t_end;
  po.dt = step_for(train, 64);
  po.sample_every = 1 << 30;
  BlockDensityMatrix rho = thermal_state(b);
  propagate(b, im, rm, rho, po, [](const BlockDensityMatrix&) {});
  return rho;
}

RelaxationModel no_relaxation() {
  RelaxationModel rm;
  rm.kind = RelaxationModel::Kind::None;
  rm.rate = 0.0;
  return rm;
}

}  // namespace

TEST(Dynamics, TraceHermiticityPositivity) {
  const BlockDensityMatrix rho = evolve(ps_train(SequenceKind::PS_I, 600.0), no_relaxation(), 5.0);
  EXPECT_NEAR(rho.trace(), 19.0, 1e-9);
  EXPECT_LT(rho.hermiticity_error(), 1e-12);
  for (const auto& blk : rho.blocks) {
    if (blk.size() == 0) continue;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(blk);
    EXPECT_GT(es.eigenvalues().minCoeff(), -1e-9);
    EXPECT_LT(es.eigenvalues().maxCoeff(), 1.0 + 1e-9);
  }
}

TEST(Dynamics, MirrorBlocksStayIdentical) {
  const BlockDensityMatrix rho = evolve(ps_train(SequenceKind::PS_I, 600.0), RelaxationModel{}, 5.0);
  const EigenBasis& b = small().basis;
  for (std::size_t k = 0; k < b.blocks.size(); ++k) {
    const std::size_t mk = detail::mirror_block(b, k);
    EXPECT_EQ((rho.blocks[k] - rho.blocks[mk]).cwiseAbs().maxCoeff(), 0.0) << "m = " << b.blocks[k].m;
  }
}

TEST(Dynamics, WeakFieldAbsorptionScalesQuadratically) {
  const EigenBasis& b = small().basis;
  const double e0 = band_energy(b, thermal_state(b));
  const double d1 = band_energy(b, evolve(ps_train(SequenceKind::PS_I, 20.0), no_relaxation(), 5.0)) - e0;
  const double d2 = band_energy(b, evolve(ps_train(SequenceKind::PS_I, 40.0), no_relaxation(), 5.0)) - e0;
  EXPECT_GT(d1, 0.0);
  EXPECT_NEAR(d2 / d1, 4.0, 0.1);
}

TEST(Dynamics, UndrivenThermalStateIsStationary) {
  const EigenBasis& b = small().basis;
  PulseTrain empty;
  InteractionModel im(b, empty);
  PropagationOptions po;
  po.t_end = 2.0;
  po.dt = 0.01;
  po.sample_every = 1000;
  BlockDensityMatrix rho = thermal_state(b);
  propagate(b, im, RelaxationModel{}, rho, po, [](const BlockDensityMatrix&) {});
  const BlockDensityMatrix ref = thermal_state(b);
  for (std::size_t k = 0; k < rho.blocks.size(); ++k)
    if (rho.blocks[k].size()) EXPECT_LT((rho.blocks[k] - ref.blocks[k]).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(Dynamics, RelaxationExactExponential) {
  const EigenBlock& blk = *small().basis.block(0);
  const auto n = static_cast<Eigen::Index>(blk.states.size());
  ASSERT_GE(n, 2);
  Eigen::MatrixXcd r = Eigen::MatrixXcd::Zero(n, n);
  r(0, 1) = r(1, 0) = 0.3;
  r(1, 1) = 0.5;
  RelaxationModel rm;
  rm.rate = 0.2;
  const double dt = 3.0;
  Eigen::MatrixXcd out = r;
  apply_relaxation(rm, blk, out, dt, 4.0);
  EXPECT_NEAR(std::abs(out(0, 1)), 0.3 * std::exp(-0.1 * dt), 1e-14);
  const double f1 = blk.states[1].occupation;
  EXPECT_NEAR(out(1, 1).real(), f1 + (0.5 - f1) * std::exp(-0.2 * dt), 1e-14);
  // generator agrees with the integrated form at small dt
  Eigen::MatrixXcd tiny = r;
  apply_relaxation(rm, blk, tiny, 1e-7, 4.0);
  const Eigen::MatrixXcd d = relaxation_term(rm, blk, r, 4.0);
  EXPECT_LT(((tiny - r) / 1e-7 - d).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(Dynamics, PauliRatesVanishAtFermiDirac) {
  const EigenBasis& b = small().basis;
  const EigenBlock& blk = *b.block(0);
  RelaxationModel rm;
  rm.pauli_blocking = true;
  Eigen::VectorXd p(static_cast<Eigen::Index>(blk.states.size()));
  for (std::size_t k = 0; k < blk.states.size(); ++k)
    p(static_cast<Eigen::Index>(k)) = fermi_dirac(blk.states[k].energy, b.fermi_level, 12.0);
  const Eigen::VectorXd d = detail::pauli_rates(rm, blk, p, 12.0);
  EXPECT_LT(d.cwiseAbs().maxCoeff(), 1e-12);
  p(0) *= 0.5;
  EXPECT_NEAR(detail::pauli_rates(rm, blk, p, 12.0).sum(), 0.0, 1e-14);
}

TEST(Dynamics, StepGuard) {
  PulseTrain t = ps_train(SequenceKind::PS_I, 600.0);
  EXPECT_THROW(step_for(t, 20), std::invalid_argument);
  EXPECT_NEAR(step_for(t, 64), t.shortest_period() / 64.0, 1e-15);
}

TEST(Dynamics, SecularPartFiltersFastCoherences) {
  const EigenBasis& b = small().basis;
  BlockDensityMatrix rho = thermal_state(b);
  const std::size_t k = static_cast<std::size_t>(std::distance(
      b.blocks.begin(), std::find_if(b.blocks.begin(), b.blocks.end(), [](const EigenBlock& x) { return x.m == 0; })));
  rho.blocks[k](0, 1) = rho.blocks[k](1, 0) = 0.1;
  const double gap = b.blocks[k].states[1].energy - b.blocks[k].states[0].energy;
  EXPECT_EQ(std::abs(secular_part(b, rho, 0.5 * gap).blocks[k](0, 1)), 0.0);
  EXPECT_EQ(std::abs(secular_part(b, rho, 2.0 * gap).blocks[k](0, 1)), 0.1);
}
