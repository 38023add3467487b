#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "interfall/experiments.hpp"
#include "interfall/oracle.hpp"
#include "interfall/scaled_units.hpp"
#include "interfall/wavepacket.hpp"

using namespace interfall;

namespace {

// 1024 samples on [-32, 32): k_max = 16 pi, so dt must stay below about 6.3e-4.
const Grid1D kGrid(1024, -32.0, 32.0);

double l2_error(const ComplexField1D& a, const ComplexField1D& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    num += std::norm(a.values[k] - b.values[k]);
    den += std::norm(b.values[k]);
  }
  return std::sqrt(num / den);
}

ComplexField1D start(const GaussianPacket& pkt) { return gaussian_packet_wavefunction(pkt, kGrid.uniform(), 1.0); }

}  // namespace

TEST(Grid1D, RequiresPowerOfTwo) {
  EXPECT_THROW(Grid1D(1000, -1.0, 1.0), DomainError);
  EXPECT_THROW(Grid1D(128, -1.0, 1.0), DomainError);
  EXPECT_THROW(Grid1D(1024, 1.0, 1.0), DomainError);
  EXPECT_NEAR(kGrid.dx(), 1.0 / 16.0, 0.0);
  EXPECT_NEAR(kGrid.k_max(), 16.0 * std::numbers::pi, 1e-12);
}

TEST(SplitStep, RejectsUnstableStep) {
  EvolutionSpec spec;
  spec.dt = 1e-3;
  spec.steps = 1;
  EXPECT_THROW(split_step_evolve(start({1.0, 0.0, 0.0}), spec), ConfigError);
}

TEST(SplitStep, RejectsProbabilityInAbsorbingBand) {
  EvolutionSpec spec;
  spec.dt = 5e-4;
  spec.steps = 1;
  EXPECT_THROW(split_step_evolve(start({1.0, 0.0, 27.0}), spec), DomainError);
}

TEST(SplitStep, FreeGaussianMatchesClosedForm) {
  const GaussianPacket pkt{1.0, 0.5, -2.0};
  EvolutionSpec spec;
  spec.dt = 5e-4;
  spec.steps = 4000;
  const ComplexField1D got = split_step_evolve(start(pkt), spec);
  const ComplexField1D want = evolve_gaussian_free(pkt, 1.0, 2.0, kGrid.uniform(), 1.0);
  EXPECT_LT(l2_error(got, want), 1e-10);
}

TEST(SplitStep, EhrenfestFall) {
  const GaussianPacket pkt{1.0, 0.0, 4.0};
  EvolutionSpec spec;
  spec.g = 1.5;
  spec.dt = 5e-4;
  spec.steps = 4000;
  const ComplexField1D got = split_step_evolve(start(pkt), spec);
  EXPECT_NEAR(got.mean_position(), 4.0 - 0.5 * 1.5 * 4.0, 1e-9);
  const ComplexField1D want = evolve_gaussian_gravity(pkt, 1.0, 1.5, 2.0, kGrid.uniform(), 1.0);
  // The Strang split is not exact for m g x alone; the residual is O(dt^2).
  EXPECT_LT(l2_error(got, want), 1e-6);
}

TEST(SplitStep, UnitaryWithoutAbsorption) {
  EvolutionSpec spec;
  spec.g = 2.0;
  spec.absorb_fraction = 0.0;
  spec.dt = 5e-4;
  spec.steps = 2000;
  spec.extra_potential = [](double x) { return 0.1 * std::cos(x); };
  const ComplexField1D got = split_step_evolve(start({1.0, 1.0, 0.0}), spec);
  EXPECT_NEAR(got.norm2(), 1.0, 1e-12);
}

// Halving dt divides the error of a nonlinear-in-x potential by four.
TEST(SplitStep, SecondOrderInTimeStep) {
  const ComplexField1D psi0 = start({1.0, 0.0, 2.0});
  auto run = [&](double dt) {
    EvolutionSpec spec;
    spec.g = 0.5;
    spec.dt = dt;
    spec.steps = static_cast<std::size_t>(std::llround(1.0 / dt));
    spec.extra_potential = [](double x) { return 0.5 * x * x; };
    return split_step_evolve(psi0, spec);
  };
  const ComplexField1D ref = run(1.0 / 32000.0);
  const double e1 = l2_error(run(1.0 / 2000.0), ref);
  const double e2 = l2_error(run(1.0 / 4000.0), ref);
  EXPECT_NEAR(e1 / e2, 4.0, 0.3);
}

// A uniformly moving frame: the momentum-boosted packet is the rest packet
// translated by v t with a plane-wave phase.
TEST(SplitStep, GalileanBoost) {
  const double p = 1.2, t = 1.5;
  EvolutionSpec spec;
  spec.dt = 5e-4;
  spec.steps = 3000;
  const ComplexField1D moving = split_step_evolve(start({1.0, p, -3.0}), spec);
  const ComplexField1D rest = split_step_evolve(start({1.0, 0.0, -3.0 + p * t}), spec);
  for (std::size_t k = 0; k < kGrid.n; ++k)
    EXPECT_NEAR(std::abs(moving.values[k]), std::abs(rest.values[k]), 1e-10);
}

TEST(LinearPotentialExact, MatchesClosedForm) {
  const GaussianPacket pkt{1.0, -0.3, 3.0};
  const ComplexField1D got = linear_potential_exact_evolve(start(pkt), 1.0, 2.0, 1.0, 1.7);
  const ComplexField1D want = evolve_gaussian_gravity(pkt, 1.0, 2.0, 1.7, kGrid.uniform(), 1.0);
  EXPECT_LT(l2_error(got, want), 1e-12);
  EXPECT_THROW(linear_potential_exact_evolve(start(pkt), 1.0, 2.0, 1.0, -1.0), DomainError);
}

TEST(SplitStep, AbsorbsOutgoingProbability) {
  EvolutionSpec spec;
  spec.dt = 5e-4;
  spec.steps = 8000;
  const ComplexField1D got = split_step_evolve(start({1.0, 8.0, 10.0}), spec);
  EXPECT_LT(got.norm2(), 1e-3);
}

TEST(ScaledUnits, RoundTripAndReducedGravity) {
  PhysicalConfig cfg;
  cfg.g = 9.8;
  const SlitGeometry geom{2.0, 3.0, 5e-6, {-2e-5, 2e-5}};
  const ScaledProblem sp = scaled_units(cfg, geom);
  EXPECT_NEAR(sp.to_si_length(sp.to_scaled_length(1.234e-4)), 1.234e-4, 1e-20);
  EXPECT_NEAR(sp.to_si_time(sp.to_scaled_time(0.7)), 0.7, 1e-15);
  EXPECT_NEAR(sp.config.g / (cfg.g * sp.time_unit * sp.time_unit / geom.a), 1.0, 1e-14);
  EXPECT_NEAR(sp.config.hbar(), 1.0, 1e-15);
  EXPECT_NEAR(sp.geometry.a, 1.0, 0.0);
  EXPECT_NEAR(sp.to_si_length(classical_displacement(sp.geometry, sp.config)) / classical_displacement(geom, cfg), 1.0,
              1e-12);
  EXPECT_NEAR(sp.to_si_length(fringe_spacing(sp.geometry, sp.config)) / fringe_spacing(geom, cfg), 1.0, 1e-12);
}

TEST(Parallel, ThreadCountDoesNotChangeResults) {
  DiffractSetup s;
  s.geometry = SlitGeometry{2.0, 1.0, 5e-6, {-2e-5, 2e-5}};
  const auto a = run_diffract(s, 1);
  const auto b = run_diffract(s, 3);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].density, b[i].density);
    EXPECT_EQ(a[i].peak_position, b[i].peak_position);
  }
}
