#include <gtest/gtest.h>

#include "toroid/experiments.hpp"
#include "toroid/oracles.hpp"

using namespace toroid;

namespace {

// Poloidal current concentrated near s = 15 nm. Flux through each alpha face is
// the same all the way round a ring and s-faces carry nothing, so the discrete
// divergence vanishes identically.
struct Solenoid {
  SectionGrid grid;
  CurrentField field;
  double current = 0.0;  // total through a circle around the z axis
};

Solenoid solenoid(std::size_t n_s, std::size_t n_a) {
  const SectionGrid grid = build_section_grid(TorusGeometry{}, n_s, n_a);
  const SectionFaces faces = section_faces(grid);
  CurrentField f = zero_current(grid);
  const double w = 1.5, c = 150.0;
  double per_radian = 0.0;
  for (std::size_t i = 0; i < grid.n_s(); ++i) per_radian += std::exp(-std::pow((grid.s(i) - 15.0) / w, 2)) * c * grid.ds();
  for (Eigen::Index k = 0; k < faces.size(); ++k) {
    if (faces.radial[static_cast<std::size_t>(k)]) continue;
    // alpha faces: area = rho ds, j_alpha = g(s) c / rho
    const double s = std::hypot(faces.rho(k) - grid.major_radius(), faces.z(k));
    f.flux(k) = std::exp(-std::pow((s - 15.0) / w, 2)) * c * grid.ds();
  }
  return {grid, f, 2.0 * units::pi * per_radian};
}

Eigen::VectorXd node_number(const EigenBasis& b, const BlockDensityMatrix& r) {
  const auto cells = static_cast<Eigen::Index>(b.grid.size());
  Eigen::VectorXd n = Eigen::VectorXd::Zero(cells);
  for (std::size_t k = 0; k < b.blocks.size(); ++k) {
    if (b.blocks[k].states.empty()) continue;
    const Eigen::MatrixXd psi = detail::state_matrix(b.blocks[k], cells);
    const Eigen::MatrixXd pr = psi * r.blocks[k].real();
    n += pr.cwiseProduct(psi).rowwise().sum();
  }
  return n.cwiseProduct(detail::quadrature_weights(b.grid));
}

}  // namespace

TEST(Observables, SolenoidIsDivergenceFree) {
  const Solenoid s = solenoid(48, 64);
  const Eigen::VectorXd d = flux_divergence(s.grid, s.field);
  EXPECT_LT(d.cwiseAbs().maxCoeff() / s.field.flux.cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Observables, ToroidalMomentMatchesThinTorus) {
  const Solenoid s = solenoid(96, 128);
  const double ref = oracles::toroidal_moment({150.0, 15.0, s.current});
  const Vec3 t = toroidal_moment(s.grid, s.field);
  EXPECT_NEAR(t[2] / ref, 1.0, 0.02);
  EXPECT_NEAR(t[0], 0.0, 1e-12 * std::abs(ref));
  EXPECT_NEAR(magnetic_moment(s.grid, s.field) / oracles::circulating_moment({150.0, 15.0, s.current}), 1.0, 0.02);
  EXPECT_LT(frobenius(quadrupole_moment(s.grid, s.field)), 1e-6 * std::abs(t[2]) * 150.0);
}

TEST(Observables, BiotSavartMatchesAnalyticPotentials) {
  const Solenoid s = solenoid(48, 64);
  const oracles::AnalyticThinTorus t{150.0, 15.0, s.current};
  BiotSavartOptions bs;
  bs.n_phi = 256;
  const std::vector<Vec3> pts{{0.0, 0.0, 0.0}, {0.0, 0.0, 300.0}, {1500.0 * std::sin(0.7), 0.0, 1500.0 * std::cos(0.7)}};
  const auto a = biot_savart(s.grid, s.field, pts, bs);
  EXPECT_NEAR(a[0][2] / oracles::on_axis_potential(t, 0.0), 1.0, 0.03);
  EXPECT_NEAR(a[1][2] / oracles::on_axis_potential(t, 300.0), 1.0, 0.03);
  const auto far = oracles::static_far_potential(t, 1500.0, 0.7);
  const double a_r = a[2][0] * std::sin(0.7) + a[2][2] * std::cos(0.7);
  const double a_t = a[2][0] * std::cos(0.7) - a[2][2] * std::sin(0.7);
  EXPECT_NEAR(a_r / far.a_r, 1.0, 0.03);
  EXPECT_NEAR(a_t / far.a_theta, 1.0, 0.03);
}

TEST(Observables, ContinuityDuringFreeEvolution) {
  Scenario sc;
  sc.n_s = 32;
  sc.n_alpha = 48;
  sc.basis.m_max = 6;
  const Prepared p = prepare(sc, 5.0);
  const PulseTrain train = make_train(sc.pulses, 0.06, 150.0);
  InteractionModel im(p.basis, train);
  RelaxationModel none;
  none.kind = RelaxationModel::Kind::None;
  none.rate = 0.0;
  PropagationOptions po;
  po.t_end = 2.0;
  po.dt = step_for(train, 64);
  po.sample_every = 1 << 30;
  BlockDensityMatrix a = thermal_state(p.basis);
  propagate(p.basis, im, none, a, po, [](const BlockDensityMatrix&) {});
  // central difference of the cell charge under H0 only
  const double h = 1e-4;
  PulseTrain empty;
  InteractionModel free(p.basis, empty);
  auto step = [&](double dt) {
    BlockDensityMatrix r = a;
    PropagationOptions o;
    o.t_start = a.time;
    o.t_end = a.time + std::abs(dt);
    o.dt = std::abs(dt) / 10.0;
    o.sample_every = 100;
    if (dt < 0) {  // backwards: evolve the conjugate
      for (auto& blk : r.blocks) blk = blk.conjugate().eval();
      propagate(p.basis, free, none, r, o, [](const BlockDensityMatrix&) {});
      for (auto& blk : r.blocks) blk = blk.conjugate().eval();
    } else {
      propagate(p.basis, free, none, r, o, [](const BlockDensityMatrix&) {});
    }
    return node_number(p.basis, r);
  };
  const Eigen::VectorXd dn = (step(h) - step(-h)) / (2.0 * h);
  const Eigen::VectorXd div = flux_divergence(p.basis.grid, current_density(p.basis, a, nullptr, a.time));
  // number per radian changes by -(1/q) 2 pi (net outflow)
  const Eigen::VectorXd expected = (-2.0 * units::pi / units::carrier_charge) * div;
  EXPECT_LT((dn - expected).norm() / dn.norm(), 1e-5);
}

TEST(Observables, FieldFreeEqualsFullWithoutPulse) {
  Scenario sc;
  sc.basis.m_max = 6;
  const Prepared p = prepare(sc, 5.0);
  const PulseTrain train = make_train(sc.pulses, 0.06, 150.0);
  SectionDrive drive(p.basis.grid, train);
  ObservableOperator tz(p.basis, drive, weights::toroidal_z(p.basis.grid));
  BlockDensityMatrix rho = thermal_state(p.basis);
  const std::size_t b0 = static_cast<std::size_t>(p.basis.block(0) - p.basis.blocks.data());
  rho.blocks[b0](0, 1) = std::complex<double>(0.0, 0.05);
  rho.blocks[b0](1, 0) = std::conj(rho.blocks[b0](0, 1));
  EXPECT_DOUBLE_EQ(tz(rho, train.end_time() + 1.0), tz.field_free(rho));
  EXPECT_NE(tz(rho, 1.0), tz.field_free(rho));
}

TEST(Observables, FourierPeakOfPureTone) {
  std::vector<double> t, v;
  const double w = 0.75;
  for (int k = 0; k < 2048; ++k) {
    t.push_back(0.05 * k);
    v.push_back(std::sin(w * t.back()));
  }
  const Spectrum s = fourier_spectrum(t, v);
  const auto k = std::distance(s.magnitude.begin(), std::max_element(s.magnitude.begin(), s.magnitude.end()));
  EXPECT_NEAR(s.frequency[static_cast<std::size_t>(k)], w, s.frequency[1]);
  t[5] += 0.01;
  EXPECT_THROW(fourier_spectrum(t, v), std::invalid_argument);
}

TEST(Observables, CycleAverageRemovesCarrier) {
  std::vector<double> t, v;
  const double period = 1.6;
  for (int k = 0; k < 1000; ++k) {
    t.push_back(0.01 * k);
    v.push_back(0.3 + std::sin(2.0 * units::pi * t.back() / period));
  }
  const auto [ta, va] = cycle_average(t, v, period);
  ASSERT_EQ(ta.size(), t.size() - 160 + 1);
  for (double x : va) EXPECT_NEAR(x, 0.3, 1e-12);
  EXPECT_NEAR(ta.front(), 0.5 * 159 * 0.01, 1e-12);
}
