#pragma once

// Cylindrical Bessel functions of the first kind, integer order, and the
// first positive zero used for radial cutoffs.

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "numeric.hpp"

namespace revb {

/// Truncation control for the ascending power series
///   J_n(x) = sum_m (-1)^m (x/2)^(2m+n) / (m! (m+n)!).
struct BesselSeriesConfig {
  int max_terms = 400;
  double abs_tol = 1e-17;

  void validate() const {
    if (max_terms < 1) throw std::invalid_argument("BesselSeriesConfig: max_terms must be >= 1");
    if (!(abs_tol >= 0.0)) throw std::invalid_argument("BesselSeriesConfig: abs_tol must be >= 0");
  }
};

/// Orders outside [-kMaxBesselOrder, kMaxBesselOrder] are rejected.
inline constexpr int kMaxBesselOrder = 64;

/// Above this argument the series loses digits to cancellation even in
/// extended precision, so Miller's downward recurrence takes over.
inline constexpr double kBesselSeriesLimit = 8.0;

namespace detail {

inline void check_bessel_args(int order, double x) {
  if (!(x >= 0.0) || !std::isfinite(x)) {
    throw std::domain_error("bessel_j: argument must be finite and >= 0, got " + std::to_string(x));
  }
  if (order > kMaxBesselOrder || order < -kMaxBesselOrder) {
    throw std::domain_error("bessel_j: order " + std::to_string(order) + " outside supported range");
  }
}

// Ascending series in long double with compensated accumulation.
inline long double bessel_series(int n, long double x, const BesselSeriesConfig& cfg) {
  const long double half = x / 2;
  long double term = 1;
  for (int k = 1; k <= n; ++k) term *= half / k;
  const long double q = -half * half;
  numeric::CompensatedSum<long double> sum;
  sum.add(term);
  for (int m = 1; m < cfg.max_terms; ++m) {
    const long double next = term * q / (static_cast<long double>(m) * (m + n));
    const bool decreasing = std::abs(next) < std::abs(term);
    sum.add(next);
    term = next;
    if (decreasing && std::abs(next) < cfg.abs_tol) return sum.value();
  }
  throw numerical_error("bessel_j: series did not converge within max_terms=" +
                        std::to_string(cfg.max_terms));
}

// Miller's algorithm: downward recurrence from a high start order, normalised
// with 1 = J_0 + 2 sum_k J_2k.
inline long double bessel_miller(int n, long double x) {
  const double top = std::max<double>(n, static_cast<double>(x));
  int start = static_cast<int>(top + 40.0 + 2.0 * std::sqrt(40.0 * top));
  start += start % 2;
  constexpr long double kBig = 1e300L;
  long double jp1 = 0;
  long double j = 1e-30L;
  long double result = 0;
  numeric::CompensatedSum<long double> norm;
  for (int k = start; k > 0; --k) {
    const long double jm1 = (2.0L * k / x) * j - jp1;
    jp1 = j;
    j = jm1;
    // j now holds J_{k-1} (unnormalised)
    if (k - 1 == n) result = j;
    if ((k - 1) % 2 == 0 && k - 1 > 0) norm.add(2 * j);
    if (std::abs(j) > kBig) {
      j /= kBig;
      jp1 /= kBig;
      result /= kBig;
      const long double nv = norm.value() / kBig;
      norm = {};
      norm.add(nv);
    }
  }
  norm.add(j);
  return result / norm.value();
}

}  // namespace detail

/// J_order(x) for integer |order| <= 64 and x >= 0. Negative orders use
/// J_{-n}(x) = (-1)^n J_n(x).
inline double bessel_j(int order, double x, const BesselSeriesConfig& cfg = {}) {
  detail::check_bessel_args(order, x);
  cfg.validate();
  const int n = order < 0 ? -order : order;
  const double sign = (order < 0 && n % 2 == 1) ? -1.0 : 1.0;
  if (x == 0.0) return n == 0 ? 1.0 : 0.0;
  long double v = 0;
  if (x <= kBesselSeriesLimit) {
    v = detail::bessel_series(n, x, cfg);
  } else {
    v = detail::bessel_miller(n, x);
  }
  return sign * static_cast<double>(v);
}

/// dJ_n/dx = (J_{n-1} - J_{n+1}) / 2, falling back to J_{n-1} - (n/x) J_n
/// (or its mirror) at the edge of the order range.
inline double bessel_j_derivative(int order, double x, const BesselSeriesConfig& cfg = {}) {
  if (order == kMaxBesselOrder && x > 0.0) {
    return bessel_j(order - 1, x, cfg) - order * bessel_j(order, x, cfg) / x;
  }
  if (order == -kMaxBesselOrder && x > 0.0) {
    return order * bessel_j(order, x, cfg) / x - bessel_j(order + 1, x, cfg);
  }
  return 0.5 * (bessel_j(order - 1, x, cfg) - bessel_j(order + 1, x, cfg));
}

/// Smallest alpha > 0 with J_order(alpha) = 0.
///
/// Scans upward in steps of pi/4 from a point known to lie before the first
/// zero, bisects the bracket down to 1e-8 and finishes with Newton steps.
inline double first_positive_zero(int order) {
  if (order < 0 || order > kMaxBesselOrder) {
    throw std::domain_error("first_positive_zero: order must lie in [0, 64]");
  }
  const BesselSeriesConfig cfg{};
  // J_n > 0 on (0, j_{n,1}) and j_{n,1} > n.
  double lo = order == 0 ? 0.5 : static_cast<double>(order);
  double flo = bessel_j(order, lo, cfg);
  constexpr double step = std::numbers::pi / 4.0;
  double hi = lo + step;
  double fhi = bessel_j(order, hi, cfg);
  while (std::signbit(flo) == std::signbit(fhi) && fhi != 0.0) {
    lo = hi;
    flo = fhi;
    hi += step;
    fhi = bessel_j(order, hi, cfg);
  }
  if (fhi == 0.0) return hi;
  while (hi - lo > 1e-8) {
    const double mid = 0.5 * (lo + hi);
    const double fm = bessel_j(order, mid, cfg);
    if (fm == 0.0) return mid;
    if (std::signbit(fm) == std::signbit(flo)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  double x = 0.5 * (lo + hi);
  for (int it = 0; it < 20; ++it) {
    const double dx = bessel_j(order, x, cfg) / bessel_j_derivative(order, x, cfg);
    x -= dx;
    if (std::abs(dx) <= 1e-15 * x) break;
  }
  if (!(x > lo - 1e-8 && x < hi + 1e-8)) {
    throw numerical_error("first_positive_zero: Newton polish left the bracket");
  }
  return x;
}

}  // namespace revb
