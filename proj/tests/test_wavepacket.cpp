#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "interfall/wavepacket.hpp"

using namespace interfall;

namespace {

PhysicalConfig units(double g) {
  PhysicalConfig c;
  c.m = 1.0;
  c.h = 2.0 * std::numbers::pi;
  c.c = 1e3;
  c.g = g;
  return c;
}

ScreenDistribution cosine_pattern(double visibility, double period, const UniformGrid& grid, double width) {
  std::vector<double> d(grid.n);
  for (std::size_t k = 0; k < grid.n; ++k) {
    const double x = grid.x(k);
    d[k] = std::exp(-x * x / (2.0 * width * width)) * (1.0 + visibility * std::cos(2.0 * std::numbers::pi * x / period));
  }
  return {grid, std::move(d)};
}

}  // namespace

TEST(GaussianPacket, InitialMomentsAndNorm) {
  const GaussianPacket pkt{0.7, 1.5, -0.4};
  const UniformGrid grid = UniformGrid::centered(-0.4, 8.0, 4001);
  const ComplexField1D f = gaussian_packet_wavefunction(pkt, grid, 1.0);
  EXPECT_NEAR(f.norm2(), 1.0, 1e-14);
  EXPECT_NEAR(f.mean_position(), -0.4, 1e-12);
  EXPECT_NEAR(f.variance(), 0.5 * 0.7 * 0.7, 1e-10);
}

TEST(GaussianPacket, ClosedFormMatchesSampledInitialState) {
  const GaussianPacket pkt{0.7, 1.5, -0.4};
  const UniformGrid grid = UniformGrid::centered(-0.4, 8.0, 2001);
  const ComplexField1D a = gaussian_packet_wavefunction(pkt, grid, 1.0);
  const ComplexField1D b = evolve_gaussian_free(pkt, 1.0, 0.0, grid, 1.0);
  for (std::size_t k = 0; k < grid.n; ++k) EXPECT_NEAR(std::abs(a.values[k] - b.values[k]), 0.0, 1e-12);
}

TEST(GaussianPacket, FreeSpreadingAndDrift) {
  const GaussianPacket pkt{0.5, 2.0, 1.0};
  const double t = 3.0, gamma = t / (0.5 * 0.5);
  const UniformGrid grid = UniformGrid::centered(7.0, 60.0, 8001);
  const ComplexField1D f = evolve_gaussian_free(pkt, 1.0, t, grid, 1.0);
  EXPECT_NEAR(f.norm2(), 1.0, 1e-10);
  EXPECT_NEAR(f.mean_position(), 1.0 + 2.0 * t, 1e-9);
  EXPECT_NEAR(f.variance(), 0.5 * 0.25 * (1.0 + gamma * gamma), 1e-8);
  EXPECT_NEAR(std::sqrt(f.variance()), gaussian_density_width(pkt, 1.0, 1.0, t), 1e-9);
}

TEST(GaussianPacket, FallsUnderGravity) {
  const GaussianPacket pkt{0.5, 0.0, 0.0};
  const double g = 4.0, t = 2.0;
  const UniformGrid grid = UniformGrid::centered(-8.0, 40.0, 8001);
  const ComplexField1D f = evolve_gaussian_gravity(pkt, 1.0, g, t, grid, 1.0);
  EXPECT_NEAR(f.mean_position(), -0.5 * g * t * t, 1e-9);
  const ComplexField1D free = evolve_gaussian_free(pkt, 1.0, t, grid, 1.0);
  EXPECT_NEAR(f.variance(), free.variance(), 1e-9);
}

TEST(GaussianPacket, RejectsBadParameters) {
  const UniformGrid grid = UniformGrid::centered(0.0, 5.0, 101);
  EXPECT_THROW(gaussian_packet_wavefunction(GaussianPacket{0.0, 0.0, 0.0}, grid, 1.0), DomainError);
  EXPECT_THROW(gaussian_packet_wavefunction(GaussianPacket{2.0, 0.0, 0.0}, grid, 1.0), CoverageError);
  EXPECT_THROW(evolve_gaussian_free(GaussianPacket{1.0, 0.0, 0.0}, 1.0, -1.0, grid, 1.0), DomainError);
}

TEST(Aperture, TransmittedProbability) {
  const GaussianPacket pkt{1.0, 0.0, 0.0};
  EXPECT_NEAR(transmitted_probability(pkt, {0.0, 1.0}), std::erf(1.0), 1e-15);
  EXPECT_NEAR(transmitted_probability(pkt, {0.0, 50.0}), 1.0, 1e-15);
  EXPECT_NEAR(transmitted_probability(pkt, {2.0, 1.0}), 0.5 * (std::erf(3.0) - std::erf(1.0)), 1e-15);
}

// An aperture far wider than the packet leaves the analytic gravity Gaussian.
TEST(Aperture, WideApertureReproducesGravityGaussian) {
  const PhysicalConfig cfg = units(2.0);
  const GaussianPacket pkt{0.5, 0.3, 0.0};
  const double t = 1.0;
  const UniformGrid grid = UniformGrid::centered(-0.7, 6.0, 601);
  const ComplexField1D got = slit_transmit_evolve(pkt, 0.0, 4.0, 1.0, cfg, t, grid);
  const ComplexField1D want = evolve_gaussian_gravity(pkt, 1.0, cfg.g, t, grid, 1.0);
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < grid.n; ++k) {
    num += std::norm(got.values[k] - want.values[k]);
    den += std::norm(want.values[k]);
  }
  EXPECT_LT(std::sqrt(num / den), 1e-6);
}

TEST(Aperture, ConditionalStateIsNormalized) {
  const PhysicalConfig cfg = units(1.0);
  const GaussianPacket pkt{1.0, 0.0, 0.0};
  // Hard edges leave 1/x^2 tails, so a little probability sits beyond the grid.
  const UniformGrid grid = UniformGrid::centered(-2.0, 150.0, 12001);
  const ComplexField1D f = aperture_transmit_evolve(pkt, {{-1.0, 0.5}, {1.0, 0.5}}, 1.0, cfg, 2.0, grid);
  EXPECT_NEAR(f.norm2(), 1.0, 2e-2);
}

TEST(Aperture, RejectsInvalidInput) {
  const PhysicalConfig cfg = units(1.0);
  const GaussianPacket pkt{1.0, 0.0, 0.0};
  const UniformGrid grid = UniformGrid::centered(0.0, 10.0, 101);
  EXPECT_THROW(slit_transmit_evolve(pkt, 0.0, 0.5, 1.0, cfg, 0.0, grid), DomainError);
  EXPECT_THROW(aperture_transmit_evolve(pkt, {}, 1.0, cfg, 1.0, grid), DomainError);
  EXPECT_THROW(slit_transmit_evolve(pkt, 0.0, 0.0, 1.0, cfg, 1.0, grid), DomainError);
  EXPECT_THROW(slit_transmit_evolve(pkt, 1e3, 0.5, 1.0, cfg, 1.0, grid), FilterBlocked);
}

TEST(TimeAverage, WindowValidation) {
  EXPECT_THROW((TimeAverageWindow{1.0, 0.0, 21}).validate(), DomainError);
  EXPECT_THROW((TimeAverageWindow{1.0, 0.1, 20}).validate(), DomainError);
  EXPECT_THROW((TimeAverageWindow{1.0, 0.1, 1}).validate(), DomainError);
  const auto [ts, ws] = TimeAverageWindow{2.0, 0.5, 21}.nodes();
  double sum = 0.0;
  for (double w : ws) sum += w;
  EXPECT_NEAR(sum, 1.0, 1e-14);
  EXPECT_GT(ts.front(), 1.5);
  EXPECT_LT(ts.back(), 2.5);
}

TEST(TimeAverage, StaticGeneratorIsUnchanged) {
  const UniformGrid grid = UniformGrid::centered(0.0, 8.0, 801);
  const ComplexField1D f = gaussian_packet_wavefunction(GaussianPacket{1.0, 0.0, 0.0}, grid, 1.0);
  const ScreenDistribution avg = time_averaged_density([&](double) { return f; }, {1.0, 0.3, 21}, grid);
  const ScreenDistribution ref = ScreenDistribution::from_field(f);
  EXPECT_LT(l1_distance(avg, ref), 1e-13);
}

// Averaging cos^2(omega t) over a window equals the closed form.
TEST(TimeAverage, OscillatingAmplitude) {
  const UniformGrid grid = UniformGrid::centered(0.0, 1.0, 3);
  const double omega = 2.0, tc = 0.4, dt = 0.3;
  const ScreenDistribution avg = time_averaged_density(
      [&](double t) {
        ComplexField1D f(grid);
        f.values = {cplx{1.0, 0.0}, cplx{std::cos(omega * t), 0.0}, cplx{1.0, 0.0}};
        return f;
      },
      {tc, dt, 21}, grid);
  const double mean_cos2 =
      0.5 + (std::sin(2.0 * omega * (tc + dt)) - std::sin(2.0 * omega * (tc - dt))) / (8.0 * omega * dt);
  EXPECT_NEAR(avg[1] / avg[0], mean_cos2, 1e-12);
}

TEST(SpinAverage, WeightedMixture) {
  const UniformGrid grid = UniformGrid::centered(0.0, 1.0, 3);
  const ScreenDistribution up(grid, {1.0, 0.0, 0.0});
  const ScreenDistribution down(grid, {0.0, 0.0, 1.0});
  const ScreenDistribution mix = spin_averaged_density(up, down, 0.25, 0.75);
  EXPECT_NEAR(mix[0] / mix[2], 1.0 / 3.0, 1e-15);
  EXPECT_THROW(spin_averaged_density(up, down, 0.5, 0.6), DomainError);
}

TEST(Extrema, FindsPeaksAndValleys) {
  const std::vector<double> y{0.0, 1.0, 0.5, 0.5, 2.0, 0.0, 3.0, 3.0, 1.0};
  const Extrema e = local_extrema(y, 0, y.size() - 1);
  EXPECT_EQ(e.maxima, (std::vector<std::size_t>{1, 4, 6}));
  EXPECT_EQ(e.minima, (std::vector<std::size_t>{2, 5}));
}

TEST(Visibility, RecoversKnownContrast) {
  const UniformGrid grid = UniformGrid::centered(0.0, 10.0, 20001);
  for (double v : {0.1, 0.5, 0.9}) {
    const ScreenDistribution d = cosine_pattern(v, 1.0, grid, 50.0);
    EXPECT_NEAR(fringe_visibility(d, 3.0), v, 1e-4) << v;
  }
}

TEST(Visibility, UndefinedWithoutFringes) {
  const UniformGrid grid = UniformGrid::centered(0.0, 10.0, 2001);
  const ScreenDistribution flat = cosine_pattern(0.0, 1.0, grid, 2.0);
  EXPECT_THROW(fringe_visibility(flat, 3.0), VisibilityUndefined);
  EXPECT_THROW(fringe_visibility(flat, 0.0), DomainError);
}
