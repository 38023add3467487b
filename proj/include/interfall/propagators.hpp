#pragma once

#include <cmath>
#include <complex>
#include <numbers>

#include "interfall/errors.hpp"
#include "interfall/physics.hpp"

namespace interfall {

namespace detail {

inline double elapsed(const SpacetimePoint& from, const SpacetimePoint& to, const char* who) {
  if (!std::isfinite(from.x) || !std::isfinite(from.t) || !std::isfinite(to.x) || !std::isfinite(to.t))
    throw DomainError(std::string(who) + ": non-finite spacetime point");
  const double dt = to.t - from.t;
  if (!(dt > 0.0)) throw DomainError(std::string(who) + ": need to.t > from.t");
  return dt;
}

/// 1/sqrt(2 pi i hbar dt / m) with 1/sqrt(i) = exp(-i pi/4).
inline std::complex<double> kernel_prefactor(double mass, double hbar, double dt) {
  const double mag = std::sqrt(mass / (2.0 * std::numbers::pi * hbar * dt));
  return std::polar(mag, -0.25 * std::numbers::pi);
}

}  // namespace detail

/// Action of the classical path from `from` to `to` in the potential m g x:
/// (m/2)[(x'-x)^2/dt - g(x+x')dt - g^2 dt^3/12].
inline double classical_action(const SpacetimePoint& from, const SpacetimePoint& to, const PhysicalConfig& cfg,
                               double mass) {
  const double dt = detail::elapsed(from, to, "classical_action");
  const double dx = to.x - from.x;
  return 0.5 * mass * (dx * dx / dt - cfg.g * (from.x + to.x) * dt - cfg.g * cfg.g * dt * dt * dt / 12.0);
}

/// Free-particle kernel K_0(x', t'; x, t).
inline std::complex<double> free_propagator(const SpacetimePoint& from, const SpacetimePoint& to, double mass,
                                            const PhysicalConfig& cfg) {
  const double dt = detail::elapsed(from, to, "free_propagator");
  const double dx = to.x - from.x;
  const double phase = mass * dx * dx / (2.0 * cfg.hbar() * dt);
  return detail::kernel_prefactor(mass, cfg.hbar(), dt) * std::polar(1.0, phase);
}

/// Kernel K_g(x', t'; x, t) for the linear potential m g x (field along -x).
inline std::complex<double> grav_propagator(const SpacetimePoint& from, const SpacetimePoint& to, double mass,
                                            const PhysicalConfig& cfg) {
  const double dt = detail::elapsed(from, to, "grav_propagator");
  const double phase = classical_action(from, to, cfg, mass) / cfg.hbar();
  return detail::kernel_prefactor(mass, cfg.hbar(), dt) * std::polar(1.0, phase);
}

/// m -/+ delta_e / (2 c^2).
inline BranchMasses branch_masses(const PhysicalConfig& cfg) {
  cfg.validate();
  const double shift = cfg.delta_e / (2.0 * cfg.c * cfg.c);
  return {cfg.m - shift, cfg.m + shift};
}

/// Gravitationally induced phase of a neutron interferometer enclosing `area`
/// and tilted by `tilt_phi`: 2 pi m_I m_G g A lambda sin(phi) / h^2.
inline double cow_phase(double m_inertial, double m_grav, double g, double area, double lambda, double tilt_phi,
                        double h) {
  if (!(m_inertial > 0.0 && m_grav > 0.0 && g > 0.0 && area > 0.0 && lambda > 0.0 && h > 0.0))
    throw DomainError("cow_phase: all parameters must be positive");
  if (!(tilt_phi >= 0.0 && tilt_phi <= 0.5 * std::numbers::pi))
    throw DomainError("cow_phase: tilt must lie in [0, pi/2]");
  return 2.0 * std::numbers::pi * m_inertial * m_grav * g * area * lambda * std::sin(tilt_phi) / (h * h);
}

}  // namespace interfall
