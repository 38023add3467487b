#pragma once

#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

#include "interfall/errors.hpp"

namespace interfall {

/// CODATA 2018 values (SI).
namespace constants {
inline constexpr double planck = 6.62607015e-34;          // J s
inline constexpr double speed_of_light = 299792458.0;     // m/s
inline constexpr double neutron_mass = 1.67492749804e-27;  // kg
inline constexpr double standard_gravity = 9.80665;        // m/s^2
}  // namespace constants

/// Physical parameters shared by every computation; the single place where
/// units are fixed. Any consistent unit system works (SI or the scaled units
/// produced by `scaled_units`).
struct PhysicalConfig {
  double m = constants::neutron_mass;  ///< rest mass
  double g = 9.8;                      ///< gravitational acceleration, field along -x
  double h = constants::planck;
  double c = constants::speed_of_light;
  double lambda = 1e-9;  ///< de Broglie wavelength of the longitudinal motion
  double delta_e = 0.0;  ///< internal energy splitting (mu B)
  /// Carry exp(-i M c^2 t / hbar) as a relative phase between the spin branches.
  bool rest_mass_phase = true;

  [[nodiscard]] double hbar() const { return h / (2.0 * std::numbers::pi); }

  /// Longitudinal speed h / (m lambda).
  [[nodiscard]] double v_z() const { return h / (m * lambda); }

  /// Semi-classical flight time over a longitudinal distance.
  [[nodiscard]] double flight_time(double distance) const { return distance * m * lambda / h; }

  void validate() const {
    auto bad = [](const char* what) { throw DomainError(std::string("PhysicalConfig: ") + what); };
    if (!(std::isfinite(m) && m > 0.0)) bad("mass must be positive");
    if (!(std::isfinite(g) && g >= 0.0)) bad("g must be non-negative");
    if (!(std::isfinite(h) && h > 0.0)) bad("h must be positive");
    if (!(std::isfinite(c) && c > 0.0)) bad("c must be positive");
    if (!(std::isfinite(lambda) && lambda > 0.0)) bad("lambda must be positive");
    if (!(std::isfinite(delta_e) && delta_e >= 0.0)) bad("delta_e must be non-negative");
    if (delta_e / (m * c * c) > 1e-2) {
      std::ostringstream os;
      os << "PhysicalConfig: delta_e/(m c^2) = " << delta_e / (m * c * c)
         << " exceeds 1e-2; the mass-operator expansion is not valid";
      throw DomainError(os.str());
    }
  }
};

/// Event (x, t).
struct SpacetimePoint {
  double x = 0.0;
  double t = 0.0;
};

/// Masses of the two internal-energy branches: spin-up (lower energy) carries
/// m_minus, spin-down carries m_plus.
struct BranchMasses {
  double m_minus = 0.0;
  double m_plus = 0.0;
};

}  // namespace interfall
