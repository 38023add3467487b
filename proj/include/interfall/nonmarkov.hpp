#pragma once

#include <cmath>
#include <sstream>
#include <utility>
#include <vector>

#include "interfall/errors.hpp"
#include "interfall/grid.hpp"
#include "interfall/spin_dynamics.hpp"
#include "interfall/wavepacket.hpp"

namespace interfall {

/// Transmission profile of a spatial filter on a screen grid, values in [0, 1].
struct FilterFunction {
  UniformGrid grid;
  std::vector<double> transmission;

  FilterFunction() = default;
  FilterFunction(UniformGrid g, std::vector<double> t) : grid(g), transmission(std::move(t)) {
    if (transmission.size() != grid.n) throw ShapeError("FilterFunction: value count != grid size");
    for (double v : transmission)
      if (!(v >= 0.0 && v <= 1.0)) throw DomainError("FilterFunction: transmission outside [0, 1]");
  }

  [[nodiscard]] FilterFunction complement() const {
    std::vector<double> c(transmission.size());
    for (std::size_t k = 0; k < c.size(); ++k) c[k] = 1.0 - transmission[k];
    return {grid, std::move(c)};
  }
};

struct FilterPair {
  FilterFunction white;
  FilterFunction black;
};

/// White passes where the spin-up density is at least the spin-down density
/// (ties go to white); black is the complement.
inline FilterPair build_complementary_filters(const ScreenDistribution& up, const ScreenDistribution& down) {
  require_same_grid(up.grid(), down.grid(), "build_complementary_filters");
  std::vector<double> w(up.size());
  for (std::size_t k = 0; k < w.size(); ++k) w[k] = up[k] >= down[k] ? 1.0 : 0.0;
  FilterFunction white(up.grid(), std::move(w));
  FilterFunction black = white.complement();
  return {std::move(white), std::move(black)};
}

/// Binary grating: white is open on [offset + j*period, offset + j*period + duty*period).
inline FilterPair grating_filters(const UniformGrid& grid, double period, double duty, double offset) {
  if (!(period > 0.0) || !(duty > 0.0 && duty < 1.0)) throw DomainError("grating_filters: need period > 0, 0 < duty < 1");
  std::vector<double> w(grid.n);
  for (std::size_t k = 0; k < grid.n; ++k) {
    const double phase = (grid.x(k) - offset) / period;
    const double frac = phase - std::floor(phase);
    w[k] = frac < duty ? 1.0 : 0.0;
  }
  FilterFunction white(grid, std::move(w));
  FilterFunction black = white.complement();
  return {std::move(white), std::move(black)};
}

/// Spin state after the spatial filter, tr_ext[sqrt(f) |Psi><Psi| sqrt(f)] / trace.
inline SpinState2 postfilter_spin_state(const JointState& state, const FilterFunction& f) {
  SpinState2::Matrix rho = SpinState2::Matrix::Zero();
  for (const auto& m : state.members()) {
    const auto& s = m.state;
    require_same_grid(s.up.grid, f.grid, "postfilter_spin_state");
    double uu = 0.0, dd = 0.0;
    cplx ud{0.0, 0.0};
    for (std::size_t k = 0; k < f.grid.n; ++k) {
      const double w = f.transmission[k];
      uu += w * std::norm(s.up.values[k]);
      dd += w * std::norm(s.down.values[k]);
      ud += w * s.up.values[k] * std::conj(s.down.values[k]);
    }
    const double dx = f.grid.dx;
    const cplx off = s.alpha * std::conj(s.beta) * ud * dx;
    rho(0, 0) += m.weight * std::norm(s.alpha) * uu * dx;
    rho(1, 1) += m.weight * std::norm(s.beta) * dd * dx;
    rho(0, 1) += m.weight * off;
    rho(1, 0) += m.weight * std::conj(off);
  }
  const double tr = rho.trace().real();
  if (!(tr > 1e-300)) throw FilterBlocked("postfilter_spin_state: the filter transmits no probability");
  return SpinState2(rho / tr, 1e-10);
}

/// (1/2) sum |p - q| dx
inline double total_variation_distance(const ScreenDistribution& p, const ScreenDistribution& q) {
  return 0.5 * l1_distance(p, q);
}

/// Screen densities of the two spin branches after the fixed re-preparation.
/// They do not depend on which filter fired.
struct DownstreamBranches {
  ScreenDistribution up;
  ScreenDistribution down;
};

struct FilterArm {
  SpinState2 spin;
  ScreenDistribution screen;
};

struct CausalBreakResult {
  FilterPair filters;
  FilterArm white;
  FilterArm black;
  DownstreamBranches conditional;
  double distinguishability = 0.0;
  /// Distinguishability with the post-filter spin replaced by the maximally mixed state.
  double ablation_distinguishability = 0.0;
};

inline FilterArm screen_for_spin(const SpinState2& spin, const DownstreamBranches& d) {
  return {spin, spin_averaged_density(d.up, d.down, spin.p_up(), 1.0 - spin.p_up())};
}

/// Filter, discard the spatial state, re-prepare, and compare the two screens.
inline CausalBreakResult causal_break_from_filters(const JointState& at_filter, FilterPair filters,
                                                   const DownstreamBranches& downstream) {
  CausalBreakResult r;
  r.white = screen_for_spin(postfilter_spin_state(at_filter, filters.white), downstream);
  r.black = screen_for_spin(postfilter_spin_state(at_filter, filters.black), downstream);
  r.filters = std::move(filters);
  r.conditional = downstream;
  r.distinguishability = total_variation_distance(r.white.screen, r.black.screen);
  // Each arm keeps its own filter but the spin memory is overwritten.
  const auto erase = [](const SpinState2&) { return SpinState2::maximally_mixed(); };
  const FilterArm white_erased = screen_for_spin(erase(r.white.spin), downstream);
  const FilterArm black_erased = screen_for_spin(erase(r.black.spin), downstream);
  r.ablation_distinguishability = total_variation_distance(white_erased.screen, black_erased.screen);
  return r;
}

}  // namespace interfall
