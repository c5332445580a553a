#pragma once

// One-dimensional quadrature: adaptive composite Gauss-Legendre and adaptive
// Simpson, plus a dual-rule certified driver.

#include <cmath>
#include <complex>
#include <numbers>
#include <type_traits>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "numeric.hpp"

namespace revb {

enum class QuadratureRule { gauss_legendre_composite, adaptive_simpson };

inline std::string_view to_string(QuadratureRule r) {
  return r == QuadratureRule::gauss_legendre_composite ? "gauss-legendre-composite" : "adaptive-simpson";
}

struct QuadratureConfig {
  QuadratureRule rule = QuadratureRule::gauss_legendre_composite;
  double abs_tol = 1e-12;
  int max_subdivisions = 1 << 16;

  void validate() const {
    if (!(abs_tol > 0.0)) throw std::invalid_argument("QuadratureConfig: abs_tol must be > 0");
    if (max_subdivisions < 1) throw std::invalid_argument("QuadratureConfig: max_subdivisions must be >= 1");
  }
};

struct GaussLegendreRule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

/// Nodes and weights by Newton iteration on P_n.
inline GaussLegendreRule gauss_legendre(int order) {
  if (order < 1) throw std::invalid_argument("gauss_legendre: order must be >= 1");
  GaussLegendreRule rule;
  rule.nodes.resize(order);
  rule.weights.resize(order);
  const int half = (order + 1) / 2;
  for (int i = 0; i < half; ++i) {
    long double x = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
    long double dp = 0;
    for (int it = 0; it < 100; ++it) {
      long double p0 = 1;
      long double p1 = 0;
      for (int j = 1; j <= order; ++j) {
        const long double p2 = p1;
        p1 = p0;
        p0 = ((2.0L * j - 1) * x * p1 - (j - 1.0L) * p2) / j;
      }
      dp = order * (x * p0 - p1) / (x * x - 1);
      const long double dx = p0 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-19L) break;
    }
    const long double w = 2.0L / ((1 - x * x) * dp * dp);
    rule.nodes[i] = static_cast<double>(-x);
    rule.nodes[order - 1 - i] = static_cast<double>(x);
    rule.weights[i] = rule.weights[order - 1 - i] = static_cast<double>(w);
  }
  return rule;
}

namespace detail {

inline const GaussLegendreRule& gl20() {
  static const GaussLegendreRule rule = gauss_legendre(20);
  return rule;
}

template <typename F>
using value_t = std::invoke_result_t<const F&, double>;

template <typename F>
value_t<F> gl_panel(const F& f, double a, double b) {
  const auto& rule = gl20();
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  numeric::CompensatedSum<value_t<F>> s;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) s.add(rule.weights[i] * f(mid + half * rule.nodes[i]));
  return half * s.value();
}

template <typename F>
value_t<F> adaptive_gl(const F& f, double a, double b, const QuadratureConfig& cfg) {
  using T = value_t<F>;
  struct Panel {
    double a, b;
    T whole;
  };
  const double span = b - a;
  numeric::CompensatedSum<T> total;
  std::vector<Panel> stack{{a, b, gl_panel(f, a, b)}};
  int subdivisions = 0;
  // Depth-first, left half first, so the summation order is fixed.
  while (!stack.empty()) {
    const Panel p = stack.back();
    stack.pop_back();
    const double mid = 0.5 * (p.a + p.b);
    const T left = gl_panel(f, p.a, mid);
    const T right = gl_panel(f, mid, p.b);
    const double local_tol = cfg.abs_tol * (p.b - p.a) / span;
    if (std::abs(left + right - p.whole) <= local_tol || p.b - p.a <= 1e-14 * span) {
      total.add(left);
      total.add(right);
      continue;
    }
    if (++subdivisions > cfg.max_subdivisions) {
      throw numerical_error("integrate: Gauss-Legendre exceeded " + std::to_string(cfg.max_subdivisions) +
                            " subdivisions");
    }
    stack.push_back({mid, p.b, right});
    stack.push_back({p.a, mid, left});
  }
  return total.value();
}

template <typename F>
value_t<F> adaptive_simpson(const F& f, double a, double b, const QuadratureConfig& cfg) {
  using T = value_t<F>;
  struct Panel {
    double a, b;
    T fa, fm, fb, whole;
    double tol;
  };
  auto simpson = [](double a, double b, T fa, T fm, T fb) { return (b - a) / 6.0 * (fa + 4.0 * fm + fb); };
  const T fa = f(a);
  const T fb = f(b);
  const T fm = f(0.5 * (a + b));
  numeric::CompensatedSum<T> total;
  std::vector<Panel> stack{{a, b, fa, fm, fb, simpson(a, b, fa, fm, fb), cfg.abs_tol}};
  int subdivisions = 0;
  const double span = b - a;
  while (!stack.empty()) {
    const Panel p = stack.back();
    stack.pop_back();
    const double m = 0.5 * (p.a + p.b);
    const T flm = f(0.5 * (p.a + m));
    const T frm = f(0.5 * (m + p.b));
    const T left = simpson(p.a, m, p.fa, flm, p.fm);
    const T right = simpson(m, p.b, p.fm, frm, p.fb);
    const T delta = left + right - p.whole;
    if (std::abs(delta) <= 15.0 * p.tol || p.b - p.a <= 1e-14 * span) {
      total.add(left + right + delta / 15.0);
      continue;
    }
    if (++subdivisions > cfg.max_subdivisions) {
      throw numerical_error("integrate: adaptive Simpson exceeded " + std::to_string(cfg.max_subdivisions) +
                            " subdivisions");
    }
    stack.push_back({m, p.b, p.fm, frm, p.fb, right, 0.5 * p.tol});
    stack.push_back({p.a, m, p.fa, flm, p.fm, left, 0.5 * p.tol});
  }
  return total.value();
}

}  // namespace detail

/// Integral of f over [a, b] with the configured rule. f may return double
/// or std::complex<double>.
template <typename F>
detail::value_t<F> integrate(const F& f, double a, double b, const QuadratureConfig& cfg = {}) {
  cfg.validate();
  if (!(b >= a)) throw std::invalid_argument("integrate: require b >= a");
  if (a == b) return detail::value_t<F>(0.0);
  if (cfg.rule == QuadratureRule::gauss_legendre_composite) return detail::adaptive_gl(f, a, b, cfg);
  return detail::adaptive_simpson(f, a, b, cfg);
}

/// Integral of f over [0, r1]. The caller supplies the r dr weight inside f.
template <typename F>
detail::value_t<F> integrate_radial(const F& f, double r1, const QuadratureConfig& cfg = {}) {
  if (!(r1 > 0.0)) throw std::invalid_argument("integrate_radial: r1 must be > 0");
  return integrate(f, 0.0, r1, cfg);
}

struct CertifiedIntegral {
  double value = 0;     // Gauss-Legendre result
  double gauss = 0;
  double simpson = 0;
  double discrepancy = 0;
};

/// Runs both rules and requires agreement within 10 * abs_tol.
template <typename F>
CertifiedIntegral integrate_certified(const F& f, double a, double b, QuadratureConfig cfg = {}) {
  cfg.rule = QuadratureRule::gauss_legendre_composite;
  const double g = integrate(f, a, b, cfg);
  cfg.rule = QuadratureRule::adaptive_simpson;
  const double s = integrate(f, a, b, cfg);
  CertifiedIntegral out{g, g, s, std::abs(g - s)};
  if (out.discrepancy > 10.0 * cfg.abs_tol) {
    throw numerical_error("integrate_certified: rules disagree by " + std::to_string(out.discrepancy));
  }
  return out;
}

}  // namespace revb
