#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "interfall/errors.hpp"
#include "interfall/oracle.hpp"
#include "interfall/slit_interference.hpp"
#include "interfall/wavepacket.hpp"

namespace interfall {

/// Numerical stand-in for the point-source slit experiment. A narrow Gaussian
/// leaves x = 0 and is carried to the slit plane in closed form. Hard apertures
/// then cut it, and the split-step propagator takes it to the screen.
struct SlitOracleSpec {
  PhysicalConfig config;  ///< normally in scaled units
  SlitGeometry geometry;
  ValidityLimits limits;
  std::size_t n = std::size_t{1} << 14;
  double half_extent = 128.0;   ///< grid is [-half_extent, half_extent)
  double source_width = 0.1;    ///< source sigma in units of lambda
  double compare_halfwidth = 24.0;  ///< comparison window around x_c
  double steps_per_limit = 2.0;     ///< dt = stability limit / steps_per_limit
};

struct SlitOracleComparison {
  double relative_l2 = 0.0;
  std::size_t steps = 0;
  std::vector<double> x;
  std::vector<double> oracle_density;    ///< normalized on the window
  std::vector<double> analytic_density;  ///< normalized on the window
};

/// Slit transmission sampled on the grid; samples on an edge get half weight.
inline std::vector<double> hard_aperture_mask(const UniformGrid& grid, const SlitGeometry& geom) {
  std::vector<double> w(grid.n, 0.0);
  const double eps = 1e-9 * grid.dx;
  for (std::size_t k = 0; k < grid.n; ++k) {
    const double x = grid.x(k);
    for (double b : geom.centers) {
      const double lo = b - geom.a, hi = b + geom.a;
      if (std::abs(x - lo) <= eps || std::abs(x - hi) <= eps) w[k] = std::max(w[k], 0.5);
      else if (x > lo && x < hi) w[k] = 1.0;
    }
  }
  return w;
}

inline SlitOracleComparison compare_slit_pattern_with_oracle(const SlitOracleSpec& s) {
  const PhysicalConfig& cfg = s.config;
  cfg.validate();
  s.geometry.validate(cfg.lambda, s.limits);
  const double hbar = cfg.hbar();
  const double T = cfg.flight_time(s.geometry.D);
  const double tau = cfg.flight_time(s.geometry.L);

  const Grid1D g1(s.n, -s.half_extent, s.half_extent);
  const UniformGrid ug = g1.uniform();
  const GaussianPacket source{s.source_width * cfg.lambda, 0.0, 0.0};
  const std::vector<double> mask = hard_aperture_mask(ug, s.geometry);
  ComplexField1D at_slit(ug);
  for (std::size_t k = 0; k < ug.n; ++k)
    if (mask[k] > 0.0) at_slit.values[k] = mask[k] * gravity_gaussian_amplitude(source, cfg.m, hbar, cfg.g, T, ug.x(k));

  EvolutionSpec spec;
  spec.mass = cfg.m;
  spec.g = cfg.g;
  spec.hbar = hbar;
  const double dt_limit = 0.25 * std::numbers::pi * 2.0 * cfg.m / (hbar * g1.k_max() * g1.k_max());
  spec.steps = static_cast<std::size_t>(std::ceil(tau / (dt_limit / s.steps_per_limit)));
  spec.dt = tau / static_cast<double>(spec.steps);
  const ComplexField1D numeric = split_step_evolve(at_slit, spec);

  SlitPatternOptions opts;
  opts.check_coverage = false;
  const ScreenWavefunction analytic = multi_slit_wavefunction(s.geometry, cfg, ug, opts, s.limits);
  const double xc = classical_displacement(s.geometry, cfg);

  SlitOracleComparison r;
  r.steps = spec.steps;
  for (std::size_t k = 0; k < ug.n; ++k) {
    const double x = ug.x(k);
    if (std::abs(x - xc) > s.compare_halfwidth) continue;
    r.x.push_back(x);
    r.oracle_density.push_back(std::norm(numeric.values[k]));
    r.analytic_density.push_back(std::norm(analytic.field.values[k]));
  }
  if (r.x.empty()) throw CoverageError("compare_slit_pattern_with_oracle: comparison window is off the grid");
  auto normalize = [](std::vector<double>& v) {
    double sum = 0.0;
    for (double e : v) sum += e;
    if (!(sum > 0.0)) throw NumericError("compare_slit_pattern_with_oracle: empty density on the window");
    for (double& e : v) e /= sum;
  };
  normalize(r.oracle_density);
  normalize(r.analytic_density);
  r.relative_l2 = relative_l2(r.oracle_density, r.analytic_density);
  return r;
}

/// The scaled desk setup: a = 1, lambda = 0.01, D = L = 200, hbar = m = 1.
inline SlitOracleSpec desk_slit_oracle(std::vector<double> centers, double g = 20.0) {
  SlitOracleSpec s;
  s.config.m = 1.0;
  s.config.h = 2.0 * std::numbers::pi;
  s.config.c = 1e9;
  s.config.lambda = 0.01;
  s.config.g = g;
  s.config.delta_e = 0.0;
  s.geometry.D = 200.0;
  s.geometry.L = 200.0;
  s.geometry.a = 1.0;
  s.geometry.centers = std::move(centers);
  if (s.geometry.centers.size() > 1) s.limits.max_paraxial_ratio = 2e-2;
  return s;
}

}  // namespace interfall
