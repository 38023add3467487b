#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <sstream>
#include <utility>
#include <vector>

#include "interfall/errors.hpp"

namespace interfall {

using cplx = std::complex<double>;

/// Fresnel cosine and sine integrals at the same argument.
struct FresnelPair {
  double c = 0.0;
  double s = 0.0;
};

namespace detail {

/// |u| below this uses the power series, above it the continued fraction.
inline constexpr double kFresnelSwitchover = 1.5;

/// cos and sin of (pi/2) u^2 with the argument reduced modulo 4 before scaling,
/// so that large |u| keeps full phase accuracy.
inline std::pair<double, double> half_pi_square_cos_sin(double u) {
  const double hi = u * u;
  const double lo = std::fma(u, u, -hi);
  const double r = std::fmod(hi, 4.0) + lo;
  const double arg = 0.5 * std::numbers::pi * r;
  return {std::cos(arg), std::sin(arg)};
}

inline FresnelPair fresnel_series(double x) {
  // x * (pi x^2 / 2)^k / k!, odd k feed S and even k feed C, each divided by 2k+1
  // with sign (-1)^floor(k/2).
  const double fact = 0.5 * std::numbers::pi * x * x;
  double term = x;
  double sum_c = x;
  double sum_s = 0.0;
  for (int k = 1; k < 200; ++k) {
    term *= fact / k;
    const double sign = ((k / 2) % 2 == 0) ? 1.0 : -1.0;
    const double contrib = sign * term / (2 * k + 1);
    if (k % 2 == 0) {
      sum_c += contrib;
    } else {
      sum_s += contrib;
    }
    if (term < std::numeric_limits<double>::epsilon() * 1e-2 * std::abs(x)) break;
  }
  return {sum_c, sum_s};
}

/// Auxiliary-function evaluation through the continued fraction of the
/// complementary error function (modified Lentz), valid for x > 1.
inline FresnelPair fresnel_continued_fraction(double x) {
  using C = std::complex<double>;
  constexpr double tiny = 1e-300;
  constexpr double eps = 2.0 * std::numeric_limits<double>::epsilon();
  const double pix2 = std::numbers::pi * x * x;
  C b{1.0, -pix2};
  C cc{1.0 / tiny, 0.0};
  C d = 1.0 / b;
  C h = d;
  int n = -1;
  bool converged = false;
  for (int k = 2; k < 10000; ++k) {
    n += 2;
    const double a = -static_cast<double>(n) * (n + 1);
    b += 4.0;
    d = 1.0 / (a * d + b);
    cc = b + a / cc;
    const C del = cc * d;
    h *= del;
    if (std::abs(del.real() - 1.0) + std::abs(del.imag()) < eps) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    std::ostringstream os;
    os << "fresnel: continued fraction did not converge at u=" << x;
    throw NumericError(os.str());
  }
  h *= C{x, -x};
  const auto [cs, sn] = half_pi_square_cos_sin(x);
  const C out = C{0.5, 0.5} * (1.0 - C{cs, sn} * h);
  return {out.real(), out.imag()};
}

}  // namespace detail

/// C(u) and S(u) with C(u) = int_0^u cos(pi x^2/2) dx, S likewise with sin.
inline FresnelPair fresnel(double u) {
  if (!std::isfinite(u)) throw DomainError("fresnel: non-finite argument");
  const double ax = std::abs(u);
  FresnelPair r;
  if (ax == 0.0) {
    return {0.0, 0.0};
  } else if (ax <= detail::kFresnelSwitchover) {
    r = detail::fresnel_series(ax);
  } else {
    r = detail::fresnel_continued_fraction(ax);
  }
  if (u < 0.0) {
    r.c = -r.c;
    r.s = -r.s;
  }
  return r;
}

inline double fresnel_c(double u) { return fresnel(u).c; }
inline double fresnel_s(double u) { return fresnel(u).s; }

/// Composite Simpson estimate of the integral of a complex integrand on [lo, hi].
///
/// `n` is the number of samples; it is raised to the next odd count so the
/// panel count is even. Throws NumericError naming the abscissa of the first
/// non-finite sample.
template <class F>
std::complex<double> complex_quadrature(F&& f, double lo, double hi, std::size_t n) {
  if (!(lo < hi)) throw DomainError("complex_quadrature: need lo < hi");
  if (n < 2) throw DomainError("complex_quadrature: need at least 2 samples");
  std::size_t panels = n - 1;
  if (panels % 2 != 0) ++panels;
  const double h = (hi - lo) / static_cast<double>(panels);
  std::complex<double> acc{0.0, 0.0};
  for (std::size_t k = 0; k <= panels; ++k) {
    const double x = (k == panels) ? hi : lo + static_cast<double>(k) * h;
    const std::complex<double> v = f(x);
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      std::ostringstream os;
      os << "complex_quadrature: non-finite integrand at x=" << x;
      throw NumericError(os.str());
    }
    const double w = (k == 0 || k == panels) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
    acc += w * v;
  }
  return acc * (h / 3.0);
}

/// Simpson panel count giving at least `per_cycle` samples per local phase
/// cycle when the integrand phase changes at most `max_phase_rate` rad per unit
/// length over an interval of length `width`. Always even and >= min_panels.
inline std::size_t panels_for_phase(double max_phase_rate, double width, std::size_t min_panels = 16,
                                    double per_cycle = 16.0) {
  const double cycles = std::abs(max_phase_rate) * width / (2.0 * std::numbers::pi);
  auto p = static_cast<std::size_t>(std::ceil(per_cycle * cycles));
  p = std::max(p, min_panels);
  if (p % 2 != 0) ++p;
  return p;
}

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;
};

inline GaussLegendre gauss_legendre(std::size_t n) {
  if (n == 0) throw DomainError("gauss_legendre: need n >= 1");
  GaussLegendre gl{std::vector<double>(n), std::vector<double>(n)};
  const std::size_t half = (n + 1) / 2;
  for (std::size_t i = 0; i < half; ++i) {
    double z = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (static_cast<double>(n) + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p1 = 1.0, p2 = 0.0;
      for (std::size_t j = 1; j <= n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / static_cast<double>(j);
      }
      dp = static_cast<double>(n) * (z * p1 - p2) / (z * z - 1.0);
      const double z_prev = z;
      z = z_prev - p1 / dp;
      if (std::abs(z - z_prev) < 1e-15) break;
    }
    gl.nodes[i] = -z;
    gl.nodes[n - 1 - i] = z;
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    gl.weights[i] = w;
    gl.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) gl.nodes[n / 2] = 0.0;
  return gl;
}

}  // namespace interfall
