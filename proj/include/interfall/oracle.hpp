#pragma once

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <cstring>
#include <functional>
#include <mutex>
#include <numbers>
#include <sstream>
#include <vector>

#include "interfall/errors.hpp"
#include "interfall/grid.hpp"

namespace interfall {

/// Periodic grid for the spectral propagator: x_k = x_min + k dx, k < n,
/// dx = (x_max - x_min)/n.
struct Grid1D {
  std::size_t n = 0;
  double x_min = 0.0;
  double x_max = 0.0;

  Grid1D(std::size_t n_, double lo, double hi) : n(n_), x_min(lo), x_max(hi) {
    if (n < 256 || (n & (n - 1)) != 0) throw DomainError("Grid1D: n must be a power of two >= 256");
    if (!(hi > lo)) throw DomainError("Grid1D: need x_max > x_min");
  }

  [[nodiscard]] double dx() const { return (x_max - x_min) / static_cast<double>(n); }
  [[nodiscard]] double k_max() const { return std::numbers::pi / dx(); }
  [[nodiscard]] UniformGrid uniform() const { return {x_min, dx(), n}; }
};

/// Everything the split-step propagator needs besides the initial field.
struct EvolutionSpec {
  double mass = 1.0;
  double g = 0.0;
  double hbar = 1.0;
  double dt = 1e-3;
  std::size_t steps = 0;
  /// Width of the absorbing band at each end, as a fraction of the grid; 0 disables it.
  double absorb_fraction = 0.1;
  /// Peak of the imaginary potential; 0 picks hbar^2 (k_max/4)^2 / (2 m).
  double absorb_strength = 0.0;
  /// Additional real potential V(x) on top of m g x.
  std::function<double(double)> extra_potential;
};

namespace detail {

inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

/// In-place forward/backward complex transforms on an fftw-allocated buffer.
class FftBuffer {
 public:
  explicit FftBuffer(std::size_t n) : n_(n) {
    data_ = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n));
    if (data_ == nullptr) throw NumericError("fftw_malloc failed");
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    const int ni = static_cast<int>(n);
    forward_ = fftw_plan_dft_1d(ni, data_, data_, FFTW_FORWARD, FFTW_ESTIMATE);
    backward_ = fftw_plan_dft_1d(ni, data_, data_, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  FftBuffer(const FftBuffer&) = delete;
  FftBuffer& operator=(const FftBuffer&) = delete;
  ~FftBuffer() {
    {
      std::lock_guard<std::mutex> lock(fftw_planner_mutex());
      fftw_destroy_plan(forward_);
      fftw_destroy_plan(backward_);
    }
    fftw_free(data_);
  }

  cplx* data() { return reinterpret_cast<cplx*>(data_); }
  void forward() { fftw_execute(forward_); }
  /// Inverse transform including the 1/n factor.
  void backward() {
    fftw_execute(backward_);
    const double s = 1.0 / static_cast<double>(n_);
    cplx* d = data();
    for (std::size_t k = 0; k < n_; ++k) d[k] *= s;
  }

 private:
  std::size_t n_;
  fftw_complex* data_ = nullptr;
  fftw_plan forward_ = nullptr;
  fftw_plan backward_ = nullptr;
};

/// Angular wavenumbers in FFT order.
inline std::vector<double> wavenumbers(std::size_t n, double dx) {
  std::vector<double> k(n);
  const double dk = 2.0 * std::numbers::pi / (static_cast<double>(n) * dx);
  for (std::size_t j = 0; j < n; ++j) {
    const auto signed_j = (j < n / 2) ? static_cast<double>(j) : static_cast<double>(j) - static_cast<double>(n);
    k[j] = signed_j * dk;
  }
  return k;
}

inline Grid1D require_oracle_grid(const UniformGrid& g) {
  Grid1D grid(g.n, g.x_min, g.x_min + g.dx * static_cast<double>(g.n));
  return grid;
}

}  // namespace detail

/// Smooth quadratic ramp rising from 0 to 1 across the outer band at each end.
inline std::vector<double> absorbing_profile(const UniformGrid& g, double fraction) {
  std::vector<double> w(g.n, 0.0);
  if (fraction <= 0.0) return w;
  const double len = static_cast<double>(g.n) * g.dx;
  const double band = fraction * len;
  const double lo = g.x_min + band;
  const double hi = g.x_min + len - band;
  for (std::size_t k = 0; k < g.n; ++k) {
    const double x = g.x(k);
    double d = 0.0;
    if (x < lo) d = (lo - x) / band;
    if (x > hi) d = (x - hi) / band;
    w[k] = d * d;
  }
  return w;
}

/// Strang-split spectral propagation of psi under H = p^2/2m + m g x + V_extra
/// for steps*dt, with an imaginary absorbing potential near the grid ends.
inline ComplexField1D split_step_evolve(const ComplexField1D& psi, const EvolutionSpec& spec) {
  const Grid1D grid = detail::require_oracle_grid(psi.grid);
  if (!(spec.dt > 0.0) || !(spec.mass > 0.0) || !(spec.hbar > 0.0))
    throw ConfigError("split_step_evolve: dt, mass and hbar must be positive");
  const double stability = spec.hbar * spec.dt * grid.k_max() * grid.k_max() / (2.0 * spec.mass);
  if (!(stability < 0.25 * std::numbers::pi)) {
    std::ostringstream os;
    os << "split_step_evolve: hbar dt k_max^2/(2m) = " << stability << " violates the stability bound pi/4";
    throw ConfigError(os.str());
  }
  const std::size_t n = grid.n;
  const UniformGrid& ug = psi.grid;
  const bool absorbing = spec.absorb_fraction > 0.0;
  const std::vector<double> ramp = absorbing_profile(ug, spec.absorb_fraction);

  const double start_norm = psi.norm2();
  if (absorbing) {
    double band = 0.0;
    for (std::size_t k = 0; k < n; ++k)
      if (ramp[k] > 0.0) band += std::norm(psi.values[k]);
    band *= ug.dx;
    if (band > 1e-8 * start_norm) {
      std::ostringstream os;
      os << "split_step_evolve: initial probability " << band / start_norm << " inside the absorbing band";
      throw DomainError(os.str());
    }
  }

  const double kc = 0.25 * grid.k_max();
  const double w0 = spec.absorb_strength > 0.0 ? spec.absorb_strength : spec.hbar * spec.hbar * kc * kc / (2.0 * spec.mass);
  std::vector<cplx> half_v(n), full_v(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double x = ug.x(k);
    double v = spec.mass * spec.g * x;
    if (spec.extra_potential) v += spec.extra_potential(x);
    const double w = absorbing ? w0 * ramp[k] : 0.0;
    const double half = 0.5 * spec.dt / spec.hbar;
    half_v[k] = std::polar(std::exp(-w * half), -v * half);
    full_v[k] = std::polar(std::exp(-2.0 * w * half), -2.0 * v * half);
  }
  const std::vector<double> kx = detail::wavenumbers(n, ug.dx);
  std::vector<cplx> kin(n);
  for (std::size_t j = 0; j < n; ++j) kin[j] = std::polar(1.0, -spec.hbar * kx[j] * kx[j] * spec.dt / (2.0 * spec.mass));

  detail::FftBuffer buf(n);
  cplx* d = buf.data();
  std::memcpy(static_cast<void*>(d), psi.values.data(), n * sizeof(cplx));
  if (spec.steps > 0) {
    for (std::size_t k = 0; k < n; ++k) d[k] *= half_v[k];
    for (std::size_t s = 0; s < spec.steps; ++s) {
      buf.forward();
      for (std::size_t j = 0; j < n; ++j) d[j] *= kin[j];
      buf.backward();
      const auto& pot = (s + 1 == spec.steps) ? half_v : full_v;
      for (std::size_t k = 0; k < n; ++k) d[k] *= pot[k];
    }
  }
  ComplexField1D out(ug, std::vector<cplx>(d, d + n));
  if (!absorbing) {
    const double loss = std::abs(out.norm2() - start_norm) / start_norm;
    if (loss > 1e-2) {
      std::ostringstream os;
      os << "split_step_evolve: norm changed by " << loss << " without absorption";
      throw NumericError(os.str());
    }
  }
  return out;
}

/// Exact spectral propagation in the potential m g x for a band-limited periodic
/// field: free evolution in Fourier space, a Fourier shift by -g t^2/2 and the
/// gravitational phase exp(-i m g t x/hbar - i m g^2 t^3/(6 hbar)).
inline ComplexField1D linear_potential_exact_evolve(const ComplexField1D& psi, double mass, double g, double hbar,
                                                    double t) {
  const Grid1D grid = detail::require_oracle_grid(psi.grid);
  if (!(t >= 0.0) || !(mass > 0.0) || !(hbar > 0.0))
    throw DomainError("linear_potential_exact_evolve: need t >= 0, mass > 0, hbar > 0");
  const std::size_t n = grid.n;
  const UniformGrid& ug = psi.grid;
  const double shift = 0.5 * g * t * t;
  const std::vector<double> kx = detail::wavenumbers(n, ug.dx);
  detail::FftBuffer buf(n);
  cplx* d = buf.data();
  std::memcpy(static_cast<void*>(d), psi.values.data(), n * sizeof(cplx));
  buf.forward();
  for (std::size_t j = 0; j < n; ++j) d[j] *= std::polar(1.0, -hbar * kx[j] * kx[j] * t / (2.0 * mass) + kx[j] * shift);
  buf.backward();
  std::vector<cplx> out(d, d + n);
  for (std::size_t k = 0; k < n; ++k) {
    const double x = ug.x(k);
    out[k] *= std::polar(1.0, -mass * g * t * x / hbar - mass * g * g * t * t * t / (6.0 * hbar));
  }
  return {ug, std::move(out)};
}

}  // namespace interfall
