#pragma once

#include <cmath>
#include <numbers>

#include "interfall/errors.hpp"
#include "interfall/physics.hpp"
#include "interfall/slit_interference.hpp"

namespace interfall {

/// Dimensionless problem: length unit = slit half-width a, mass unit = m,
/// time unit = m a^2 / hbar so that hbar = m = 1 and h = 2 pi.
struct ScaledProblem {
  PhysicalConfig config;
  SlitGeometry geometry;
  double length_unit = 1.0;  ///< m
  double mass_unit = 1.0;    ///< kg
  double time_unit = 1.0;    ///< s

  [[nodiscard]] double energy_unit() const { return mass_unit * length_unit * length_unit / (time_unit * time_unit); }

  [[nodiscard]] double to_scaled_length(double x) const { return x / length_unit; }
  [[nodiscard]] double to_si_length(double x) const { return x * length_unit; }
  [[nodiscard]] double to_scaled_time(double t) const { return t / time_unit; }
  [[nodiscard]] double to_si_time(double t) const { return t * time_unit; }
  [[nodiscard]] double to_scaled_mass(double m) const { return m / mass_unit; }
  [[nodiscard]] double to_si_mass(double m) const { return m * mass_unit; }
  [[nodiscard]] double to_scaled_energy(double e) const { return e / energy_unit(); }
  [[nodiscard]] double to_si_energy(double e) const { return e * energy_unit(); }
  /// Densities per unit length.
  [[nodiscard]] double to_si_density(double rho) const { return rho / length_unit; }
  [[nodiscard]] double to_scaled_density(double rho) const { return rho * length_unit; }
};

inline ScaledProblem scaled_units(const PhysicalConfig& cfg, const SlitGeometry& geom) {
  cfg.validate();
  if (!(geom.a > 0.0)) throw DomainError("scaled_units: slit half-width must be positive");
  ScaledProblem sp;
  sp.length_unit = geom.a;
  sp.mass_unit = cfg.m;
  sp.time_unit = cfg.m * geom.a * geom.a / cfg.hbar();
  const double tu = sp.time_unit;
  const double lu = sp.length_unit;
  sp.config = cfg;
  sp.config.m = 1.0;
  sp.config.h = 2.0 * std::numbers::pi;
  sp.config.g = cfg.g * tu * tu / lu;
  sp.config.c = cfg.c * tu / lu;
  sp.config.lambda = cfg.lambda / lu;
  sp.config.delta_e = sp.to_scaled_energy(cfg.delta_e);
  sp.geometry = geom;
  sp.geometry.D = geom.D / lu;
  sp.geometry.L = geom.L / lu;
  sp.geometry.a = 1.0;
  for (double& b : sp.geometry.centers) b /= lu;
  return sp;
}

}  // namespace interfall
