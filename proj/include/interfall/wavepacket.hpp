#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <optional>
#include <sstream>
#include <vector>

#include "interfall/core_math.hpp"
#include "interfall/errors.hpp"
#include "interfall/grid.hpp"
#include "interfall/physics.hpp"

namespace interfall {

/// psi_0(x) = (pi sigma^2)^{-1/4} exp(-(x-x0)^2/(2 sigma^2) + i p (x-x0)/hbar).
/// The density |psi_0|^2 has variance sigma^2/2.
struct GaussianPacket {
  double sigma = 1e-3;
  double p = 0.0;
  double x0 = 0.0;

  void validate() const {
    if (!(std::isfinite(sigma) && sigma > 0.0)) throw DomainError("GaussianPacket: sigma must be positive");
    if (!std::isfinite(p) || !std::isfinite(x0)) throw DomainError("GaussianPacket: non-finite p or x0");
  }
};

/// Free evolution in closed form (convolution of the packet with the free kernel):
/// psi(x,t) = (pi sigma^2)^{-1/4} (1+i gamma)^{-1/2}
///            exp[-(x-x0-vt)^2 / (2 sigma^2 (1+i gamma)) + i k (x-x0) - i hbar k^2 t/(2m)]
/// with k = p/hbar, v = p/m, gamma = hbar t/(m sigma^2).
inline cplx free_gaussian_amplitude(const GaussianPacket& pkt, double mass, double hbar, double t, double x) {
  const double k = pkt.p / hbar;
  const double v = pkt.p / mass;
  const double gamma = hbar * t / (mass * pkt.sigma * pkt.sigma);
  const cplx one_ig{1.0, gamma};
  const double u = x - pkt.x0 - v * t;
  const double norm = std::pow(std::numbers::pi * pkt.sigma * pkt.sigma, -0.25);
  const cplx expo = -u * u / (2.0 * pkt.sigma * pkt.sigma * one_ig) +
                    cplx{0.0, k * (x - pkt.x0) - hbar * k * k * t / (2.0 * mass)};
  return norm / std::sqrt(one_ig) * std::exp(expo);
}

/// Same packet evolved in the potential m g x:
/// psi_g(x,t) = exp(-i m g t x/hbar - i m g^2 t^3/(6 hbar)) psi_free(x + g t^2/2, t).
inline cplx gravity_gaussian_amplitude(const GaussianPacket& pkt, double mass, double hbar, double g, double t,
                                       double x) {
  const double phase = -mass * g * t * x / hbar - mass * g * g * t * t * t / (6.0 * hbar);
  return std::polar(1.0, phase) * free_gaussian_amplitude(pkt, mass, hbar, t, x + 0.5 * g * t * t);
}

namespace detail {

inline void require_packet_coverage(const GaussianPacket& pkt, double center, double width, const UniformGrid& grid,
                                    const char* who) {
  if (center - 4.0 * width < grid.x_min || center + 4.0 * width > grid.x_max()) {
    std::ostringstream os;
    os << who << ": grid [" << grid.x_min << ", " << grid.x_max() << "] does not cover 8 widths around " << center;
    throw CoverageError(os.str());
  }
  (void)pkt;
}

}  // namespace detail

/// Samples the packet at t = 0 and normalizes it discretely.
inline ComplexField1D gaussian_packet_wavefunction(const GaussianPacket& pkt, const UniformGrid& grid, double hbar) {
  pkt.validate();
  detail::require_packet_coverage(pkt, pkt.x0, pkt.sigma, grid, "gaussian_packet_wavefunction");
  ComplexField1D f(grid);
  for (std::size_t k = 0; k < grid.n; ++k) {
    const double u = grid.x(k) - pkt.x0;
    f.values[k] = std::polar(std::exp(-u * u / (2.0 * pkt.sigma * pkt.sigma)), pkt.p * u / hbar);
  }
  f.normalize();
  return f;
}

/// Analytic free evolution sampled on `grid` (continuum normalization kept).
inline ComplexField1D evolve_gaussian_free(const GaussianPacket& pkt, double mass, double t, const UniformGrid& grid,
                                           double hbar) {
  pkt.validate();
  if (!(t >= 0.0)) throw DomainError("evolve_gaussian_free: t must be non-negative");
  if (!(mass > 0.0)) throw DomainError("evolve_gaussian_free: mass must be positive");
  ComplexField1D f(grid);
  for (std::size_t k = 0; k < grid.n; ++k) f.values[k] = free_gaussian_amplitude(pkt, mass, hbar, t, grid.x(k));
  return f;
}

/// Analytic evolution in the potential m g x sampled on `grid`.
inline ComplexField1D evolve_gaussian_gravity(const GaussianPacket& pkt, double mass, double g, double t,
                                              const UniformGrid& grid, double hbar) {
  pkt.validate();
  if (!(t >= 0.0)) throw DomainError("evolve_gaussian_gravity: t must be non-negative");
  ComplexField1D f(grid);
  for (std::size_t k = 0; k < grid.n; ++k)
    f.values[k] = gravity_gaussian_amplitude(pkt, mass, hbar, g, t, grid.x(k));
  return f;
}

/// Standard deviation of |psi(x,t)|^2 for the freely evolving packet.
inline double gaussian_density_width(const GaussianPacket& pkt, double mass, double hbar, double t) {
  const double gamma = hbar * t / (mass * pkt.sigma * pkt.sigma);
  return pkt.sigma * std::sqrt(0.5 * (1.0 + gamma * gamma));
}

/// Transmitting interval [center - half_width, center + half_width].
struct Aperture {
  double center = 0.0;
  double half_width = 0.0;
};

/// Probability of the packet inside one aperture, from the error function.
inline double transmitted_probability(const GaussianPacket& pkt, const Aperture& ap) {
  const double s = pkt.sigma;
  const double lo = (ap.center - ap.half_width - pkt.x0) / s;
  const double hi = (ap.center + ap.half_width - pkt.x0) / s;
  return 0.5 * (std::erf(hi) - std::erf(lo));
}

namespace detail {

/// Unnormalized integral over the apertures of K_g(x, t; x0, 0) psi_0(x0) on the
/// grid with a fixed number of Simpson panels per aperture.
inline std::vector<cplx> aperture_integral(const GaussianPacket& pkt, const std::vector<Aperture>& apertures,
                                           double mass, const PhysicalConfig& cfg, double t, const UniformGrid& grid,
                                           std::size_t panels) {
  const double hbar = cfg.hbar();
  const double kappa = mass / (hbar * t);
  const double norm0 = std::pow(std::numbers::pi * pkt.sigma * pkt.sigma, -0.25);
  const cplx pref = std::polar(std::sqrt(mass / (2.0 * std::numbers::pi * hbar * t)), -0.25 * std::numbers::pi);
  std::vector<cplx> out(grid.n, cplx{0.0, 0.0});
  for (const Aperture& ap : apertures) {
    const double lo = ap.center - ap.half_width;
    const double h = 2.0 * ap.half_width / static_cast<double>(panels);
    // Terms of the action that depend on x0 alone, folded into the weights:
    // m x0^2/(2 hbar t) - m g x0 t/(2 hbar) + p (x0 - x_pkt)/hbar, with the packet envelope.
    std::vector<cplx> weight(panels + 1);
    for (std::size_t j = 0; j <= panels; ++j) {
      const double x0 = lo + static_cast<double>(j) * h;
      const double u = x0 - pkt.x0;
      const double w = (j == 0 || j == panels) ? 1.0 : (j % 2 == 1 ? 4.0 : 2.0);
      const double phase = 0.5 * kappa * x0 * x0 - 0.5 * mass * cfg.g * x0 * t / hbar + pkt.p * u / hbar;
      weight[j] = std::polar(w * h / 3.0 * norm0 * std::exp(-u * u / (2.0 * pkt.sigma * pkt.sigma)), phase);
    }
    for (std::size_t k = 0; k < grid.n; ++k) {
      const double x = grid.x(k);
      // exp(-i kappa x x0_j) advanced geometrically along the uniform x0 nodes.
      const cplx step = std::polar(1.0, -kappa * x * h);
      cplx rot = std::polar(1.0, -kappa * x * lo);
      cplx acc{0.0, 0.0};
      for (std::size_t j = 0; j <= panels; ++j) {
        acc += weight[j] * rot;
        rot *= step;
      }
      out[k] += acc;
    }
  }
  for (std::size_t k = 0; k < grid.n; ++k) {
    const double x = grid.x(k);
    const double phase = 0.5 * kappa * x * x - 0.5 * mass * cfg.g * x * t / hbar -
                         mass * cfg.g * cfg.g * t * t * t / (24.0 * hbar);
    out[k] *= pref * std::polar(1.0, phase);
  }
  return out;
}

}  // namespace detail

/// Tolerance on the relative L2 change when the panel count is doubled.
inline constexpr double kApertureConvergence = 1e-4;

/// Propagates the packet truncated by a set of hard apertures for a time `t`
/// in the potential m g x, normalized by the square root of the transmitted
/// probability so the result is the unit-norm conditional state.
inline ComplexField1D aperture_transmit_evolve(const GaussianPacket& pkt, const std::vector<Aperture>& apertures,
                                               double mass, const PhysicalConfig& cfg, double t,
                                               const UniformGrid& grid) {
  pkt.validate();
  if (!(t > 0.0)) throw DomainError("slit_transmit_evolve: t must be positive");
  if (!(mass > 0.0)) throw DomainError("slit_transmit_evolve: mass must be positive");
  if (apertures.empty()) throw DomainError("slit_transmit_evolve: no aperture");
  double transmitted = 0.0;
  double reach = 0.0;
  double widest = 0.0;
  for (const Aperture& ap : apertures) {
    if (!(ap.half_width > 0.0)) throw DomainError("slit_transmit_evolve: aperture half-width must be positive");
    transmitted += transmitted_probability(pkt, ap);
    reach = std::max(reach, std::abs(ap.center) + ap.half_width);
    widest = std::max(widest, 2.0 * ap.half_width);
  }
  if (!(transmitted > 0.0)) throw FilterBlocked("slit_transmit_evolve: apertures transmit no probability");

  // d(phase)/dx0 = kappa (x0 - x) - m g t/(2 hbar) + p/hbar is linear in x and x0,
  // so its largest magnitude sits at a corner of grid x aperture. The envelope
  // adds its own rate.
  const double hbar = cfg.hbar();
  const double kappa = mass / (hbar * t);
  double rate = 0.0;
  for (const Aperture& ap : apertures)
    for (double x0 : {ap.center - ap.half_width, ap.center + ap.half_width})
      for (double x : {grid.x_min, grid.x_max()})
        rate = std::max(rate, std::abs(kappa * (x0 - x) - 0.5 * mass * cfg.g * t / hbar + pkt.p / hbar));
  rate += (reach + std::abs(pkt.x0)) / (pkt.sigma * pkt.sigma);
  const std::size_t panels = panels_for_phase(rate, widest, 16, 32.0);

  auto coarse = detail::aperture_integral(pkt, apertures, mass, cfg, t, grid, panels);
  auto fine = detail::aperture_integral(pkt, apertures, mass, cfg, t, grid, 2 * panels);
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < grid.n; ++k) {
    num += std::norm(fine[k] - coarse[k]);
    den += std::norm(fine[k]);
  }
  const double change = den > 0.0 ? std::sqrt(num / den) : 0.0;
  if (!(change <= kApertureConvergence)) {
    std::ostringstream os;
    os << "slit_transmit_evolve: quadrature not converged (relative L2 change " << change << " with " << panels
       << " panels)";
    throw NumericError(os.str());
  }
  const double scale = 1.0 / std::sqrt(transmitted);
  for (auto& v : fine) v *= scale;
  return {grid, std::move(fine)};
}

/// Single-aperture form.
inline ComplexField1D slit_transmit_evolve(const GaussianPacket& pkt, double b, double a, double mass,
                                           const PhysicalConfig& cfg, double t, const UniformGrid& grid) {
  return aperture_transmit_evolve(pkt, {Aperture{b, a}}, mass, cfg, t, grid);
}

/// Window [t_center - delta_t, t_center + delta_t] sampled at n Gauss-Legendre nodes.
struct TimeAverageWindow {
  double t_center = 0.0;
  double delta_t = 0.0;
  std::size_t n_samples = 21;

  void validate() const {
    if (!(std::isfinite(t_center) && std::isfinite(delta_t) && delta_t > 0.0))
      throw DomainError("TimeAverageWindow: delta_t must be positive");
    if (n_samples < 3 || n_samples % 2 == 0) throw DomainError("TimeAverageWindow: n_samples must be odd and >= 3");
  }

  /// Nodes and weights normalized so the weights sum to one.
  [[nodiscard]] std::pair<std::vector<double>, std::vector<double>> nodes() const {
    validate();
    const GaussLegendre gl = gauss_legendre(n_samples);
    std::vector<double> ts(n_samples), ws(n_samples);
    for (std::size_t i = 0; i < n_samples; ++i) {
      ts[i] = t_center + delta_t * gl.nodes[i];
      ws[i] = 0.5 * gl.weights[i];
    }
    return {ts, ws};
  }
};

/// (1/2 dt) int |psi(x, t)|^2 dt over the window, renormalized on the grid.
/// `generator(t)` returns the amplitude at time t on `grid`.
inline ScreenDistribution time_averaged_density(const std::function<ComplexField1D(double)>& generator,
                                                const TimeAverageWindow& window, const UniformGrid& grid) {
  const auto [ts, ws] = window.nodes();
  std::vector<double> acc(grid.n, 0.0);
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const ComplexField1D f = generator(ts[i]);
    require_same_grid(f.grid, grid, "time_averaged_density");
    for (std::size_t k = 0; k < grid.n; ++k) acc[k] += ws[i] * std::norm(f.values[k]);
  }
  return {grid, std::move(acc)};
}

/// alpha2 * up + beta2 * down.
inline ScreenDistribution spin_averaged_density(const ScreenDistribution& up, const ScreenDistribution& down,
                                                double alpha2, double beta2) {
  require_same_grid(up.grid(), down.grid(), "spin_averaged_density");
  if (!(alpha2 >= 0.0 && beta2 >= 0.0) || std::abs(alpha2 + beta2 - 1.0) > 1e-12)
    throw DomainError("spin_averaged_density: weights must be probabilities summing to one");
  std::vector<double> mix(up.size());
  for (std::size_t k = 0; k < up.size(); ++k) mix[k] = alpha2 * up[k] + beta2 * down[k];
  return {up.grid(), std::move(mix)};
}

/// Indices of strict local extrema (plateaus count once, at their first sample).
struct Extrema {
  std::vector<std::size_t> maxima;
  std::vector<std::size_t> minima;
};

inline Extrema local_extrema(std::span<const double> y, std::size_t lo, std::size_t hi) {
  Extrema e;
  if (hi >= y.size()) hi = y.size() - 1;
  for (std::size_t k = std::max<std::size_t>(lo, 1); k + 1 <= hi && k + 1 < y.size(); ++k) {
    std::size_t j = k;
    while (j + 1 < y.size() && y[j + 1] == y[k]) ++j;
    if (j + 1 >= y.size()) break;
    if (y[k] > y[k - 1] && y[k] > y[j + 1]) e.maxima.push_back(k);
    if (y[k] < y[k - 1] && y[k] < y[j + 1]) e.minima.push_back(k);
    k = j;
  }
  return e;
}

/// Fringe contrast (I_max - I_min)/(I_max + I_min) inside a window of the given
/// half-width around the centroid. I_max is the largest local maximum, I_min the
/// smallest local minimum between the two largest maxima.
inline double fringe_visibility(const ScreenDistribution& d, double window_halfwidth) {
  if (!(window_halfwidth > 0.0)) throw DomainError("fringe_visibility: window half-width must be positive");
  const UniformGrid& g = d.grid();
  const double mu = d.mean_position();
  const double lo_x = std::max(g.x_min, mu - window_halfwidth);
  const double hi_x = std::min(g.x_max(), mu + window_halfwidth);
  const auto lo = static_cast<std::size_t>(std::ceil((lo_x - g.x_min) / g.dx));
  const auto hi = static_cast<std::size_t>(std::floor((hi_x - g.x_min) / g.dx));
  const Extrema e = local_extrema(d.values(), lo, hi);
  if (e.maxima.size() + e.minima.size() < 3 || e.maxima.size() < 2)
    throw VisibilityUndefined("fringe_visibility: fewer than three extrema in the window");
  std::vector<std::size_t> order = e.maxima;
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return d[i] > d[j]; });
  const std::size_t first = std::min(order[0], order[1]);
  const std::size_t second = std::max(order[0], order[1]);
  std::optional<double> i_min;
  for (std::size_t m : e.minima)
    if (m > first && m < second) i_min = std::min(i_min.value_or(d[m]), d[m]);
  if (!i_min) throw VisibilityUndefined("fringe_visibility: no minimum between the two largest maxima");
  const double i_max = d[order[0]];
  return (i_max - *i_min) / (i_max + *i_min);
}

}  // namespace interfall
