#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <span>
#include <sstream>
#include <vector>

#include "interfall/core_math.hpp"
#include "interfall/errors.hpp"
#include "interfall/grid.hpp"
#include "interfall/physics.hpp"

namespace interfall {

/// Thresholds of the semi-classical (paraxial, short-wavelength) regime.
struct ValidityLimits {
  double max_wavelength_ratio = 1e-3;  ///< lambda / min(D, L)
  double max_paraxial_ratio = 1e-2;    ///< (|b| + a) / min(D, L)
};

/// Point source at z = 0, slit plane at z = D, screen at z = D + L. Every slit
/// has half-width `a`; `centers` are the slit centers b_i along x.
struct SlitGeometry {
  double D = 2.0;
  double L = 1.0;
  double a = 5e-6;
  std::vector<double> centers{0.0};

  [[nodiscard]] double eta() const { return 1.0 + L / D; }

  void validate(double lambda, const ValidityLimits& limits = {}) const {
    auto bad = [](const std::string& what) { throw DomainError("SlitGeometry: " + what); };
    if (!(std::isfinite(D) && D > 0.0)) bad("D must be positive");
    if (!(std::isfinite(L) && L > 0.0)) bad("L must be positive");
    if (!(std::isfinite(a) && a > 0.0)) bad("a must be positive");
    if (centers.empty()) bad("at least one slit is required");
    for (std::size_t i = 0; i < centers.size(); ++i) {
      if (!std::isfinite(centers[i])) bad("non-finite slit center");
      for (std::size_t j = i + 1; j < centers.size(); ++j)
        if (!(std::abs(centers[i] - centers[j]) > 2.0 * a)) bad("slits overlap");
    }
    const double shortest = std::min(D, L);
    if (lambda / shortest > limits.max_wavelength_ratio) {
      std::ostringstream os;
      os << "lambda/min(D,L) = " << lambda / shortest << " outside the semi-classical regime";
      bad(os.str());
    }
    double widest = 0.0;
    for (double b : centers) widest = std::max(widest, std::abs(b) + a);
    if (widest / shortest > limits.max_paraxial_ratio) {
      std::ostringstream os;
      os << "(|b|+a)/min(D,L) = " << widest / shortest << " outside the paraxial regime";
      bad(os.str());
    }
  }
};

/// Gravitational offset inside sigma_pm:
/// (1/2) g m^2 lambda^2 D L / h^2.
inline double sigma_gravity_offset(const SlitGeometry& geom, const PhysicalConfig& cfg) {
  const double r = cfg.m * cfg.lambda / cfg.h;
  return 0.5 * cfg.g * r * r * geom.D * geom.L;
}

/// Fresnel-integral limit for the slit edge b + sign*a seen from screen position x.
inline double sigma_pm(double x, double b, int sign, const SlitGeometry& geom, const PhysicalConfig& cfg) {
  const double eta = geom.eta();
  const double scale = std::sqrt(2.0 * eta / (cfg.lambda * geom.L));
  const double edge = b + (sign >= 0 ? geom.a : -geom.a);
  return scale * (edge - x / eta - sigma_gravity_offset(geom, cfg));
}

/// Common screen phase, identical for every slit center.
inline double phase_phi(double x, const SlitGeometry& geom, const PhysicalConfig& cfg) {
  const double total = geom.D + geom.L;
  const double h2 = cfg.h * cfg.h;
  const double m2 = cfg.m * cfg.m;
  const double diff = geom.D - geom.L;
  return std::numbers::pi *
         (x * x / (cfg.lambda * total) - cfg.m * cfg.g * x * cfg.lambda * total / h2 -
          cfg.g * cfg.g / 12.0 * m2 * m2 * cfg.lambda * cfg.lambda * cfg.lambda / (h2 * h2) * total * diff * diff);
}

/// Classical fall between slit and screen for a particle leaving the source
/// with the upward speed that brings it back to x = 0 at the slit:
/// -g m^2 lambda^2 (L^2 + L D) / (2 h^2).
inline double classical_displacement(const SlitGeometry& geom, const PhysicalConfig& cfg) {
  const double r = cfg.m * cfg.lambda / cfg.h;
  return -0.5 * cfg.g * r * r * (geom.L * geom.L + geom.L * geom.D);
}

struct SlitPatternOptions {
  bool include_common_phase = true;  ///< multiply by exp(i phi(x))
  bool normalize = true;             ///< renormalize discretely over the grid
  bool check_coverage = true;
};

/// Screen wavefunction together with the setup that produced it.
struct ScreenWavefunction {
  ComplexField1D field;
  SlitGeometry geometry;
  PhysicalConfig config;
  SlitPatternOptions options;

  [[nodiscard]] const UniformGrid& grid() const { return field.grid; }
  [[nodiscard]] std::vector<double> density() const { return field.density(); }
};

/// Unnormalized-by-grid amplitude of one slit, including the sqrt(lambda D / 2a)
/// conditional-probability factor: e^{i phi}/(2i sqrt(eta a)) [dC + i dS].
inline cplx single_slit_amplitude(double x, double b, const SlitGeometry& geom, const PhysicalConfig& cfg,
                                  bool include_common_phase = true) {
  const FresnelPair up = fresnel(sigma_pm(x, b, +1, geom, cfg));
  const FresnelPair lo = fresnel(sigma_pm(x, b, -1, geom, cfg));
  const cplx bracket{up.c - lo.c, up.s - lo.s};
  const cplx pref = 1.0 / (cplx{0.0, 2.0} * std::sqrt(geom.eta() * geom.a));
  cplx amp = pref * bracket;
  if (include_common_phase) amp *= std::polar(1.0, phase_phi(x, geom, cfg));
  return amp;
}

namespace detail {

inline ScreenWavefunction finish_pattern(ComplexField1D field, const SlitGeometry& geom, const PhysicalConfig& cfg,
                                         const SlitPatternOptions& opts) {
  if (opts.check_coverage) {
    const auto dens = field.density();
    const double edge = edge_mass_fraction(dens, 0.02);
    if (edge >= 0.05) {
      std::ostringstream os;
      os << "screen grid too narrow: " << edge * 100.0 << "% of the probability lies in the outer 2% of the grid";
      throw CoverageError(os.str());
    }
  }
  if (opts.normalize) field.normalize();
  return {std::move(field), geom, cfg, opts};
}

}  // namespace detail

/// Screen wavefunction behind a single slit centered at `b` (the geometry's
/// other slits are ignored).
inline ScreenWavefunction single_slit_wavefunction(double b, const SlitGeometry& geom, const PhysicalConfig& cfg,
                                                   const UniformGrid& grid, const SlitPatternOptions& opts = {}) {
  cfg.validate();
  SlitGeometry one = geom;
  one.centers = {b};
  one.validate(cfg.lambda);
  ComplexField1D field(grid);
  for (std::size_t k = 0; k < grid.n; ++k)
    field.values[k] = single_slit_amplitude(grid.x(k), b, one, cfg, opts.include_common_phase);
  return detail::finish_pattern(std::move(field), one, cfg, opts);
}

/// Equal-weight superposition over all slit centers, renormalized on the grid.
inline ScreenWavefunction multi_slit_wavefunction(const SlitGeometry& geom, const PhysicalConfig& cfg,
                                                  const UniformGrid& grid, const SlitPatternOptions& opts = {},
                                                  const ValidityLimits& limits = {}) {
  cfg.validate();
  geom.validate(cfg.lambda, limits);
  ComplexField1D field(grid);
  for (std::size_t k = 0; k < grid.n; ++k) {
    const double x = grid.x(k);
    cplx sum{0.0, 0.0};
    for (double b : geom.centers) sum += single_slit_amplitude(x, b, geom, cfg, false);
    if (opts.include_common_phase) sum *= std::polar(1.0, phase_phi(x, geom, cfg));
    field.values[k] = sum;
  }
  return detail::finish_pattern(std::move(field), geom, cfg, opts);
}

/// Distance between adjacent bright fringes of two slits at +/-b: lambda L / (2 b).
inline double fringe_spacing(const SlitGeometry& geom, const PhysicalConfig& cfg) {
  double widest = 0.0;
  for (double b : geom.centers) widest = std::max(widest, std::abs(b));
  if (widest == 0.0) throw DomainError("fringe_spacing: slits are not separated");
  return cfg.lambda * geom.L / (2.0 * widest);
}

/// Screen grid covering the pattern: centered on the classically expected
/// position, half-extent of six envelope widths (lambda L / 2a) eta plus the
/// projected slit span; at least 2048 samples and 32 per fringe.
inline UniformGrid default_screen_grid(const SlitGeometry& geom, const PhysicalConfig& cfg) {
  const double eta = geom.eta();
  const double envelope = cfg.lambda * geom.L / (2.0 * geom.a) * eta;
  double lo = geom.centers.front(), hi = geom.centers.front();
  for (double b : geom.centers) {
    lo = std::min(lo, b);
    hi = std::max(hi, b);
  }
  const double center = classical_displacement(geom, cfg) + eta * 0.5 * (lo + hi);
  const double half = 6.0 * envelope + eta * (0.5 * (hi - lo) + geom.a);
  std::size_t n = 2048;
  if (geom.centers.size() >= 2) {
    const double per_fringe = 32.0 * 2.0 * half / fringe_spacing(geom, cfg);
    n = std::max<std::size_t>(n, static_cast<std::size_t>(std::ceil(per_fringe)));
  }
  return UniformGrid::centered(center, half, n);
}

/// Largest relative deviation between two sampled densities. Samples below
/// `floor` times the reference peak are compared against that floor.
inline double pattern_relative_error(std::span<const double> value, std::span<const double> reference,
                                     double floor = 0.0) {
  if (value.size() != reference.size()) throw ShapeError("pattern_relative_error: size mismatch");
  const double peak = *std::max_element(reference.begin(), reference.end());
  double worst = 0.0;
  for (std::size_t k = 0; k < value.size(); ++k) {
    const double den = std::max(std::abs(reference[k]), floor * peak);
    if (den == 0.0) {
      if (value[k] != 0.0) return std::numeric_limits<double>::infinity();
      continue;
    }
    worst = std::max(worst, std::abs(value[k] - reference[k]) / den);
  }
  return worst;
}

/// Pointwise tolerance of the free-fall check. Exact dark fringes make a pure
/// relative error meaningless, so samples below kFreefallFloor times the peak
/// are measured against that floor.
inline constexpr double kFreefallTolerance = 1e-9;
inline constexpr double kFreefallFloor = 1e-6;

/// Relabels the screen coordinate to the freely falling frame, xi = x - x_c, and
/// checks that the result coincides with the g = 0 pattern on the xi grid.
inline ScreenWavefunction freefall_transform(const ScreenWavefunction& w, double floor = kFreefallFloor) {
  const double xc = classical_displacement(w.geometry, w.config);
  ScreenWavefunction out = w;
  out.field.grid = w.field.grid.shifted(-xc);
  PhysicalConfig still = w.config;
  still.g = 0.0;
  SlitPatternOptions opts = w.options;
  opts.check_coverage = false;
  const ScreenWavefunction ref = multi_slit_wavefunction(w.geometry, still, out.field.grid, opts);
  const auto got = out.density();
  const auto want = ref.density();
  const double err = pattern_relative_error(got, want, floor);
  if (!(err < kFreefallTolerance)) {
    std::ostringstream os;
    os << "freefall_transform: pattern differs from the g=0 pattern by " << err;
    throw InvariantViolation(os.str());
  }
  out.config = still;
  return out;
}

}  // namespace interfall
