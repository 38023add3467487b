#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "interfall/core_math.hpp"
#include "interfall/errors.hpp"

namespace interfall {

/// Uniform 1-D sampling x_k = x_min + k*dx, k = 0..n-1.
struct UniformGrid {
  double x_min = 0.0;
  double dx = 1.0;
  std::size_t n = 0;

  static UniformGrid from_extent(double lo, double hi, std::size_t n) {
    if (!(hi > lo) || n < 2) throw DomainError("UniformGrid: need hi > lo and n >= 2");
    return UniformGrid{lo, (hi - lo) / static_cast<double>(n - 1), n};
  }

  /// Grid centered on `center` with half-width `half_extent`.
  static UniformGrid centered(double center, double half_extent, std::size_t n) {
    return from_extent(center - half_extent, center + half_extent, n);
  }

  [[nodiscard]] double x(std::size_t k) const { return x_min + static_cast<double>(k) * dx; }
  [[nodiscard]] double x_max() const { return x(n - 1); }
  [[nodiscard]] std::size_t size() const { return n; }

  [[nodiscard]] UniformGrid shifted(double offset) const { return {x_min + offset, dx, n}; }

  [[nodiscard]] std::vector<double> positions() const {
    std::vector<double> out(n);
    for (std::size_t k = 0; k < n; ++k) out[k] = x(k);
    return out;
  }

  /// Same sample count and spacing, origins equal to a few ulps of the extent.
  [[nodiscard]] bool matches(const UniformGrid& o) const {
    if (n != o.n) return false;
    const double scale = std::max({std::abs(x_min), std::abs(x_max()), std::abs(dx) * double(n)});
    const double tol = 1e-12 * scale;
    return std::abs(x_min - o.x_min) <= tol && std::abs(dx - o.dx) <= 1e-12 * std::abs(dx);
  }
};

inline void require_same_grid(const UniformGrid& a, const UniformGrid& b, const char* what) {
  if (!a.matches(b)) throw ShapeError(std::string(what) + ": grids differ");
}

/// Sampled complex wavefunction on a uniform grid (units m^{-1/2}).
struct ComplexField1D {
  UniformGrid grid;
  std::vector<cplx> values;

  ComplexField1D() = default;
  explicit ComplexField1D(UniformGrid g) : grid(g), values(g.n, cplx{0.0, 0.0}) {}
  ComplexField1D(UniformGrid g, std::vector<cplx> v) : grid(g), values(std::move(v)) {
    if (values.size() != grid.n) throw ShapeError("ComplexField1D: value count != grid size");
  }

  [[nodiscard]] std::size_t size() const { return values.size(); }

  /// sum |psi|^2 dx
  [[nodiscard]] double norm2() const {
    double s = 0.0;
    for (const auto& v : values) s += std::norm(v);
    return s * grid.dx;
  }

  void normalize() {
    const double n2 = norm2();
    if (!(n2 > 0.0) || !std::isfinite(n2)) throw NumericError("ComplexField1D: cannot normalize a null field");
    const double f = 1.0 / std::sqrt(n2);
    for (auto& v : values) v *= f;
  }

  [[nodiscard]] std::vector<double> density() const {
    std::vector<double> d(values.size());
    for (std::size_t k = 0; k < values.size(); ++k) d[k] = std::norm(values[k]);
    return d;
  }

  /// First moment of |psi|^2 / norm.
  [[nodiscard]] double mean_position() const {
    double s0 = 0.0, s1 = 0.0;
    for (std::size_t k = 0; k < values.size(); ++k) {
      const double p = std::norm(values[k]);
      s0 += p;
      s1 += p * grid.x(k);
    }
    return s1 / s0;
  }

  [[nodiscard]] double variance() const {
    const double mu = mean_position();
    double s0 = 0.0, s2 = 0.0;
    for (std::size_t k = 0; k < values.size(); ++k) {
      const double p = std::norm(values[k]);
      s0 += p;
      s2 += p * (grid.x(k) - mu) * (grid.x(k) - mu);
    }
    return s2 / s0;
  }
};

/// <a|b> = sum conj(a) b dx.
inline cplx inner_product(const ComplexField1D& a, const ComplexField1D& b) {
  require_same_grid(a.grid, b.grid, "inner_product");
  cplx s{0.0, 0.0};
  for (std::size_t k = 0; k < a.size(); ++k) s += std::conj(a.values[k]) * b.values[k];
  return s * a.grid.dx;
}

/// Non-negative probability density normalized so that sum rho dx = 1.
class ScreenDistribution {
 public:
  ScreenDistribution() = default;

  /// Takes ownership of `density` and renormalizes it on the grid.
  ScreenDistribution(UniformGrid g, std::vector<double> density) : grid_(g), rho_(std::move(density)) {
    if (rho_.size() != grid_.n) throw ShapeError("ScreenDistribution: value count != grid size");
    double s = 0.0;
    for (double& v : rho_) {
      if (!std::isfinite(v)) throw NumericError("ScreenDistribution: non-finite density");
      if (v < 0.0) {
        if (v < -1e-14) throw NumericError("ScreenDistribution: negative density");
        v = 0.0;
      }
      s += v;
    }
    s *= grid_.dx;
    if (!(s > 0.0)) throw NumericError("ScreenDistribution: zero total probability");
    for (double& v : rho_) v /= s;
  }

  static ScreenDistribution from_field(const ComplexField1D& f) { return {f.grid, f.density()}; }

  [[nodiscard]] const UniformGrid& grid() const { return grid_; }
  [[nodiscard]] std::span<const double> values() const { return rho_; }
  [[nodiscard]] double operator[](std::size_t k) const { return rho_[k]; }
  [[nodiscard]] std::size_t size() const { return rho_.size(); }

  [[nodiscard]] double total() const {
    double s = 0.0;
    for (double v : rho_) s += v;
    return s * grid_.dx;
  }

  [[nodiscard]] double mean_position() const {
    double s = 0.0;
    for (std::size_t k = 0; k < rho_.size(); ++k) s += rho_[k] * grid_.x(k);
    return s * grid_.dx;
  }

 private:
  UniformGrid grid_;
  std::vector<double> rho_;
};

/// sum |p - q| dx
inline double l1_distance(const ScreenDistribution& p, const ScreenDistribution& q) {
  require_same_grid(p.grid(), q.grid(), "l1_distance");
  double s = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) s += std::abs(p[k] - q[k]);
  return s * p.grid().dx;
}

/// ||p - q||_2 / ||q||_2 on the shared grid.
inline double relative_l2(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw ShapeError("relative_l2: size mismatch");
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    num += (p[k] - q[k]) * (p[k] - q[k]);
    den += q[k] * q[k];
  }
  return std::sqrt(num / den);
}

/// Fraction of probability sitting in the outer `edge_fraction` of the grid (both ends together).
inline double edge_mass_fraction(std::span<const double> density, double edge_fraction) {
  const std::size_t n = density.size();
  const auto band = static_cast<std::size_t>(std::ceil(edge_fraction * static_cast<double>(n) / 2.0));
  double total = 0.0, edge = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    total += density[k];
    if (k < band || k >= n - band) edge += density[k];
  }
  return total > 0.0 ? edge / total : 0.0;
}

}  // namespace interfall
