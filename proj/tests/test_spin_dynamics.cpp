#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "interfall/spin_dynamics.hpp"
#include "interfall/wavepacket.hpp"

using namespace interfall;

namespace {

PhysicalConfig units(double g, double split) {
  PhysicalConfig c;
  c.m = 1.0;
  c.h = 2.0 * std::numbers::pi;
  c.c = 1e3;
  c.g = g;
  c.delta_e = split * c.m * c.c * c.c;
  return c;
}

ComplexField1D packet(const UniformGrid& grid, double x0, double p = 0.0) {
  return gaussian_packet_wavefunction(GaussianPacket{1.0, p, x0}, grid, 1.0);
}

}  // namespace

TEST(SpinState2, RejectsInvalidMatrices) {
  SpinState2::Matrix m = SpinState2::Matrix::Zero();
  m(0, 0) = 0.6;
  m(1, 1) = 0.6;
  EXPECT_THROW(SpinState2{m}, DomainError);
  m(1, 1) = 0.4;
  m(0, 1) = 0.3;
  EXPECT_THROW(SpinState2{m}, DomainError);
  m(1, 0) = 0.3;
  m(0, 1) = m(1, 0) = 0.8;
  EXPECT_THROW(SpinState2{m}, DomainError);
  m(0, 1) = m(1, 0) = std::nan("");
  EXPECT_THROW(SpinState2{m}, NumericError);
}

TEST(SpinState2, PureAndMixedStates) {
  const SpinState2 p = SpinState2::pure(std::sqrt(0.8), cplx{0.0, std::sqrt(0.2)});
  EXPECT_NEAR(p.purity(), 1.0, 1e-14);
  EXPECT_NEAR(p.p_up(), 0.8, 1e-15);
  EXPECT_NEAR(std::abs(p.coherence() - cplx{0.0, -0.4}), 0.0, 1e-15);
  const SpinState2 mixed = SpinState2::maximally_mixed();
  EXPECT_NEAR(mixed.purity(), 0.5, 1e-15);
  EXPECT_NEAR(mixed.eigenvalues()[0], 0.5, 1e-15);
}

TEST(JointState, RejectsOffSphereAmplitudes) {
  const UniformGrid grid = UniformGrid::centered(0.0, 10.0, 201);
  EXPECT_THROW(JointState::pure(1.0, 1.0, packet(grid, 0.0), packet(grid, 0.0)), DomainError);
  EXPECT_THROW(JointState::pure(1.0, 0.0, packet(grid, 0.0), packet(UniformGrid::centered(0.0, 9.0, 201), 0.0)),
               ShapeError);
  EXPECT_THROW(JointState::mixture({}), DomainError);
}

TEST(ReducedSpin, CoherenceIsAmplitudeProductTimesOverlap) {
  const UniformGrid grid = UniformGrid::centered(0.0, 12.0, 2401);
  const cplx alpha{0.6, 0.0}, beta{0.0, 0.8};
  const JointState js = JointState::pure(alpha, beta, packet(grid, -0.5, 0.3), packet(grid, 0.7));
  const SpinState2 s = reduced_spin_state(js);
  const cplx ov = branch_overlap(js);
  EXPECT_NEAR(std::abs(s.coherence() - alpha * std::conj(beta) * ov), 0.0, 1e-15);
  // Two displaced Gaussians of width 1: |<a|b>| = exp(-d^2/4 - ...)
  EXPECT_LT(std::abs(ov), 1.0);
  EXPECT_NEAR(s.p_up(), 0.36, 1e-15);
}

TEST(Entropy, ZeroForProductAndOneBitForOrthogonalBranches) {
  const UniformGrid grid = UniformGrid::centered(0.0, 40.0, 4001);
  const double r = std::sqrt(0.5);
  const JointState product = JointState::pure(r, r, packet(grid, 0.0), packet(grid, 0.0));
  EXPECT_NEAR(entanglement_entropy(product), 0.0, 1e-6);
  const JointState split = JointState::pure(r, r, packet(grid, -15.0), packet(grid, 15.0));
  EXPECT_NEAR(entanglement_entropy(split), 1.0, 1e-12);
}

TEST(Entropy, MixedStatesAreUnsupported) {
  const UniformGrid grid = UniformGrid::centered(0.0, 10.0, 201);
  const JointState mixed = JointState::from_spin_state(SpinState2::maximally_mixed(), packet(grid, 0.0));
  EXPECT_FALSE(mixed.is_pure());
  EXPECT_THROW(entanglement_entropy(mixed), UnsupportedState);
  EXPECT_THROW(branch_overlap(mixed), UnsupportedState);
}

TEST(Eigenvalues, ClosedFormMatchesNumerics) {
  const UniformGrid grid = UniformGrid::centered(0.0, 14.0, 2801);
  const double pu = 0.3;
  const JointState js = JointState::pure(std::sqrt(pu), std::sqrt(1.0 - pu), packet(grid, -0.9), packet(grid, 1.1, 0.4));
  const auto numeric = reduced_spin_state(js).eigenvalues();
  const auto closed = spin_eigenvalues_from_overlap(pu, std::abs(branch_overlap(js)));
  EXPECT_NEAR(numeric[0], closed[0], 1e-12);
  EXPECT_NEAR(numeric[1], closed[1], 1e-12);
}

TEST(ControlledEvolution, BranchesPickTheirMasses) {
  const PhysicalConfig cfg = units(1.0, 5e-3);
  const UniformGrid grid = UniformGrid::centered(0.0, 10.0, 101);
  const double r = std::sqrt(0.5);
  std::vector<double> seen;
  const BranchEvolver ev = [&](const ComplexField1D& f, double mass, double) {
    seen.push_back(mass);
    return f;
  };
  controlled_evolve(JointState::pure(r, r, packet(grid, 0.0), packet(grid, 0.0)), cfg, 1.0, ev);
  const BranchMasses bm = branch_masses(cfg);
  ASSERT_EQ(seen.size(), 2u);
  EXPECT_EQ(seen[0], bm.m_minus);
  EXPECT_EQ(seen[1], bm.m_plus);
}

TEST(ControlledEvolution, RestMassPhaseOnDownAmplitude) {
  PhysicalConfig cfg = units(0.0, 1e-3);
  cfg.rest_mass_phase = true;
  const UniformGrid grid = UniformGrid::centered(0.0, 10.0, 101);
  const double r = std::sqrt(0.5), t = 0.37;
  const BranchEvolver ident = [](const ComplexField1D& f, double, double) { return f; };
  const JointState out = controlled_evolve(JointState::pure(r, r, packet(grid, 0.0), packet(grid, 0.0)), cfg, t, ident);
  const auto& s = out.members().front().state;
  const double phase = std::arg(s.beta / s.alpha);
  EXPECT_NEAR(std::remainder(phase + cfg.delta_e * t / cfg.hbar(), 2.0 * std::numbers::pi), 0.0, 1e-12);
}

// Diagonal spin states never acquire coherence or change populations.
TEST(IncoherentInvariance, RandomTriples) {
  std::mt19937_64 rng(20260);
  std::uniform_real_distribution<double> uq(0.0, 1.0), ux(-2.0, 2.0), ut(0.05, 1.5), ug(0.0, 10.0);
  const UniformGrid grid = UniformGrid::centered(-3.0, 30.0, 1201);
  for (int i = 0; i < 20; ++i) {
    const double q = uq(rng), x0 = ux(rng), t = ut(rng);
    const PhysicalConfig cfg = units(ug(rng), 1e-2);
    const GaussianPacket pkt{1.0, 0.0, x0};
    const BranchEvolver ev = [&](const ComplexField1D&, double mass, double tt) {
      return evolve_gaussian_gravity(pkt, mass, cfg.g, tt, grid, 1.0);
    };
    const SpinState2 out = incoherent_invariance_check(q, packet(grid, x0), cfg, t, ev);
    EXPECT_NEAR(out.p_up(), q, 1e-10);
    EXPECT_LT(std::abs(out.coherence()), 1e-10);
  }
  EXPECT_THROW(incoherent_invariance_check(1.5, packet(grid, 0.0), units(1.0, 0.0), 1.0,
                                           [](const ComplexField1D& f, double, double) { return f; }),
               DomainError);
}

TEST(ReducedDensity, WeightsBranches) {
  const UniformGrid grid = UniformGrid::centered(0.0, 30.0, 3001);
  const JointState js = JointState::pure(std::sqrt(0.25), std::sqrt(0.75), packet(grid, -10.0), packet(grid, 10.0));
  const ScreenDistribution d = reduced_position_density(js);
  EXPECT_NEAR(d.total(), 1.0, 1e-12);
  EXPECT_NEAR(d.mean_position(), 0.25 * -10.0 + 0.75 * 10.0, 1e-9);
}
