#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "interfall/slit_interference.hpp"
#include "interfall/wavepacket.hpp"

using namespace interfall;

namespace {

SlitGeometry fig1(double L) { return SlitGeometry{2.0, L, 5e-6, {0.0}}; }

PhysicalConfig no_gravity() {
  PhysicalConfig c;
  c.g = 0.0;
  return c;
}

}  // namespace

TEST(SigmaPm, EdgeValueWithoutGravity) {
  const SlitGeometry geom = fig1(1.0);
  const PhysicalConfig cfg = no_gravity();
  const double expect = std::sqrt(2.0 * geom.eta() / (cfg.lambda * geom.L)) * geom.a;
  EXPECT_NEAR(sigma_pm(0.0, 0.0, +1, geom, cfg), expect, 1e-12 * expect);
  EXPECT_NEAR(sigma_pm(0.0, 0.0, -1, geom, cfg), -expect, 1e-12 * expect);
}

TEST(SigmaPm, DifferenceIndependentOfPositionAndGravity) {
  const SlitGeometry geom{2.0, 3.0, 5e-6, {1e-5}};
  const double expect = 2.0 * geom.a * std::sqrt(2.0 * geom.eta() / (1e-9 * geom.L));
  for (double g : {0.0, 9.8, 50.0}) {
    PhysicalConfig cfg;
    cfg.g = g;
    for (double x : {-1e-4, 0.0, 3e-5})
      EXPECT_NEAR(sigma_pm(x, 1e-5, +1, geom, cfg) - sigma_pm(x, 1e-5, -1, geom, cfg), expect, 1e-9 * expect);
  }
}

// The offset inside sigma_pm, scaled by eta, is exactly the classical displacement.
TEST(SigmaPm, GravityOffsetMatchesClassicalDisplacement) {
  const PhysicalConfig cfg;
  for (double L : {1.0, 3.0, 8.0}) {
    const SlitGeometry geom = fig1(L);
    const double off = sigma_gravity_offset(geom, cfg);
    EXPECT_NEAR(-geom.eta() * off, classical_displacement(geom, cfg), 1e-12 * std::abs(classical_displacement(geom, cfg)));
  }
}

TEST(PhasePhi, ZeroAtOriginWithoutGravity) {
  const SlitGeometry geom = fig1(1.0);
  EXPECT_EQ(phase_phi(0.0, geom, no_gravity()), 0.0);
}

TEST(PhasePhi, PureFresnelCurvatureWithoutGravity) {
  const SlitGeometry geom = fig1(3.0);
  const PhysicalConfig cfg = no_gravity();
  for (double x : {-2e-5, 1e-4})
    EXPECT_NEAR(phase_phi(x, geom, cfg), std::numbers::pi * x * x / (cfg.lambda * 5.0), 1e-12);
}

TEST(ClassicalDisplacement, Identities) {
  PhysicalConfig cfg;
  const SlitGeometry geom = fig1(3.0);
  const double T = cfg.flight_time(geom.D), tau = cfg.flight_time(geom.L);
  EXPECT_NEAR(classical_displacement(geom, cfg), -0.5 * cfg.g * tau * (tau + T), 1e-12 * 0.5 * cfg.g * tau * (tau + T));
  EXPECT_EQ(classical_displacement(geom, no_gravity()), 0.0);
  SlitGeometry flat = geom;
  flat.L = 1e-300;
  EXPECT_NEAR(classical_displacement(flat, cfg), 0.0, 1e-300);
}

TEST(SingleSlit, EvenWithoutGravity) {
  const SlitGeometry geom = fig1(1.0);
  const PhysicalConfig cfg = no_gravity();
  const UniformGrid grid = UniformGrid::centered(0.0, 1e-3, 4001);
  const ScreenWavefunction w = single_slit_wavefunction(0.0, geom, cfg, grid);
  for (std::size_t k = 0; k < grid.n / 2; ++k)
    EXPECT_NEAR(std::abs(w.field.values[k]), std::abs(w.field.values[grid.n - 1 - k]), 1e-9 * std::abs(w.field.values[k]) + 1e-300);
}

TEST(SingleSlit, NormalizedOnGrid) {
  for (double L : {1.0, 3.0, 8.0}) {
    const SlitGeometry geom = fig1(L);
    const PhysicalConfig cfg;
    const ScreenWavefunction w = multi_slit_wavefunction(geom, cfg, default_screen_grid(geom, cfg));
    EXPECT_NEAR(w.field.norm2(), 1.0, 1e-6);
  }
}

TEST(SingleSlit, CoverageErrorOnNarrowGrid) {
  const SlitGeometry geom = fig1(1.0);
  const PhysicalConfig cfg = no_gravity();
  // A window cut through the flank of the central lobe keeps most of its mass at one edge.
  EXPECT_THROW(single_slit_wavefunction(0.0, geom, cfg, UniformGrid::centered(1e-4, 2e-5, 512)), CoverageError);
}

TEST(SingleSlit, OneCenterMatchesMultiSlit) {
  const SlitGeometry geom{2.0, 3.0, 5e-6, {1e-5}};
  const PhysicalConfig cfg;
  const UniformGrid grid = default_screen_grid(geom, cfg);
  const auto a = single_slit_wavefunction(1e-5, geom, cfg, grid);
  const auto b = multi_slit_wavefunction(geom, cfg, grid);
  for (std::size_t k = 0; k < grid.n; ++k) EXPECT_NEAR(std::abs(a.field.values[k] - b.field.values[k]), 0.0, 1e-9);
}

TEST(MultiSlit, FringeSpacingFromPeakFinding) {
  const SlitGeometry geom{2.0, 3.0, 5e-6, {-2e-5, 2e-5}};
  const PhysicalConfig cfg = no_gravity();
  const ScreenWavefunction w = multi_slit_wavefunction(geom, cfg, default_screen_grid(geom, cfg));
  const auto d = w.density();
  const UniformGrid& g = w.grid();
  // Neighbours of the central maximum, refined by a parabola through three samples.
  const Extrema e = local_extrema(d, 0, g.n - 1);
  std::vector<double> peaks;
  for (std::size_t k : e.maxima) {
    if (d[k] < 0.5 * d[g.n / 2]) continue;
    const double num = d[k - 1] - d[k + 1];
    const double den = d[k - 1] - 2.0 * d[k] + d[k + 1];
    peaks.push_back(g.x(k) + 0.5 * g.dx * num / den);
  }
  ASSERT_EQ(peaks.size(), 3u);
  const double measured = 0.5 * (peaks[2] - peaks[0]);
  EXPECT_NEAR(measured / fringe_spacing(geom, cfg), 1.0, 2e-2);
}

TEST(MultiSlit, GravityOnlyTranslatesThePattern) {
  for (const std::vector<double>& c : {std::vector<double>{0.0}, std::vector<double>{-2e-5, 2e-5}}) {
    for (double L : {1.0, 3.0, 8.0}) {
      const SlitGeometry geom{2.0, L, 5e-6, c};
      const PhysicalConfig cfg;
      const ScreenWavefunction w = multi_slit_wavefunction(geom, cfg, default_screen_grid(geom, cfg));
      EXPECT_NO_THROW(freefall_transform(w)) << "L=" << L;
    }
  }
}

TEST(MultiSlit, FreefallTransformIsIdentityWithoutGravity) {
  const SlitGeometry geom{2.0, 3.0, 5e-6, {-2e-5, 2e-5}};
  const PhysicalConfig cfg = no_gravity();
  const ScreenWavefunction w = multi_slit_wavefunction(geom, cfg, default_screen_grid(geom, cfg));
  const ScreenWavefunction t = freefall_transform(w);
  EXPECT_EQ(t.grid().x_min, w.grid().x_min);
  EXPECT_EQ(t.field.values, w.field.values);
}

TEST(MultiSlit, TransformUndoesTranslation) {
  const SlitGeometry geom{2.0, 3.0, 5e-6, {0.0}};
  const PhysicalConfig cfg;
  const ScreenWavefunction w = multi_slit_wavefunction(geom, cfg, default_screen_grid(geom, cfg));
  const ScreenWavefunction t = freefall_transform(w);
  EXPECT_NEAR(t.grid().x_min + classical_displacement(geom, cfg), w.grid().x_min, 1e-18);
}

TEST(MultiSlit, DetectsBrokenInvariance) {
  const SlitGeometry geom{2.0, 3.0, 5e-6, {0.0}};
  PhysicalConfig cfg;
  ScreenWavefunction w = multi_slit_wavefunction(geom, cfg, default_screen_grid(geom, cfg));
  w.field.grid = w.field.grid.shifted(1e-6);
  EXPECT_THROW(freefall_transform(w), InvariantViolation);
}

// Moving every slit by delta and the screen coordinate by eta*delta leaves |psi| unchanged.
TEST(MultiSlit, TranslationCovarianceWithoutGravity) {
  const PhysicalConfig cfg = no_gravity();
  const SlitGeometry a{2.0, 3.0, 5e-6, {-2e-5, 2e-5}};
  const double delta = 7e-6;
  SlitGeometry b = a;
  for (double& c : b.centers) c += delta;
  const UniformGrid grid = default_screen_grid(a, cfg);
  SlitPatternOptions opts;
  opts.include_common_phase = false;
  const auto wa = multi_slit_wavefunction(a, cfg, grid, opts);
  const auto wb = multi_slit_wavefunction(b, cfg, grid.shifted(a.eta() * delta), opts);
  for (std::size_t k = 0; k < grid.n; ++k)
    EXPECT_NEAR(std::abs(wa.field.values[k]), std::abs(wb.field.values[k]), 1e-6 * std::abs(wa.field.values[k]) + 1e-9);
}

TEST(MultiSlit, CommonPhaseNeverChangesDensity) {
  const PhysicalConfig cfg;
  const SlitGeometry geom{2.0, 8.0, 5e-6, {-4e-5, 0.0, 4e-5}};
  const UniformGrid grid = default_screen_grid(geom, cfg);
  SlitPatternOptions off;
  off.include_common_phase = false;
  const auto a = multi_slit_wavefunction(geom, cfg, grid).density();
  const auto b = multi_slit_wavefunction(geom, cfg, grid, off).density();
  for (std::size_t k = 0; k < grid.n; ++k) EXPECT_NEAR(a[k], b[k], 1e-12 * a[k] + 1e-300);
}

TEST(Geometry, ValidationRejectsBadSetups) {
  const double lambda = 1e-9;
  EXPECT_THROW((SlitGeometry{2.0, 1.0, 5e-6, {0.0, 5e-6}}).validate(lambda), DomainError);
  EXPECT_THROW((SlitGeometry{2.0, 1.0, 5e-6, {}}).validate(lambda), DomainError);
  EXPECT_THROW((SlitGeometry{-2.0, 1.0, 5e-6, {0.0}}).validate(lambda), DomainError);
  EXPECT_THROW((SlitGeometry{2.0, 1.0, 5e-6, {0.0}}).validate(2e-3), DomainError);
  EXPECT_THROW((SlitGeometry{2.0, 1.0, 1.5e-2, {0.0}}).validate(lambda), DomainError);
  ValidityLimits loose;
  loose.max_paraxial_ratio = 1e-2;
  EXPECT_NO_THROW((SlitGeometry{2.0, 1.0, 5e-6, {-1e-3, 1e-3}}).validate(lambda, loose));
}

// Central peak of the single slit pattern at the three screen distances.
TEST(Fig1, PeakTracksClassicalDisplacement) {
  const PhysicalConfig cfg;
  double previous = 0.0;
  for (double L : {1.0, 3.0, 8.0}) {
    const SlitGeometry geom = fig1(L);
    const ScreenWavefunction w = multi_slit_wavefunction(geom, cfg, default_screen_grid(geom, cfg));
    const auto d = w.density();
    std::size_t best = 0;
    for (std::size_t k = 1; k < d.size(); ++k)
      if (d[k] > d[best]) best = k;
    const double envelope = cfg.lambda * L / (2.0 * geom.a);
    const double xc = classical_displacement(geom, cfg);
    EXPECT_LT(std::abs(w.grid().x(best) - xc), 0.02 * envelope) << L;
    EXPECT_LT(xc, previous);
    previous = xc;
  }
}
