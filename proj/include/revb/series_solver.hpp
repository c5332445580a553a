#pragma once

// Generalized power-series (Frobenius) solution of the radial Dirac system
//
//   R_s(r) = r^alpha sum_k C^s_k r^k,   s = 1..4,
//
// with component angular indices (n, n+1, n, n+1). Plugging into the mode
// reduced Dirac equation gives the coupled recurrences (natural units)
//
//   (a+k-n)   C1_k = i k_z C2_{k-1} + i (E+m) C4_{k-1}
//   (a+k+n+1) C2_k = -i k_z C1_{k-1} + i (E+m) C3_{k-1}
//   (a+k-n)   C3_k = i k_z C4_{k-1} + i (E-m) C2_{k-1}
//   (a+k+n+1) C4_k = -i k_z C3_{k-1} + i (E-m) C1_{k-1}
//
// Coefficients are generated from the ratio forms (C3 = C1/lambda and the
// pairwise ratios between chains), which avoid the cancellation present in
// the coupled form; the coupled form is only used to re-check the table.

#include <array>
#include <cmath>
#include <complex>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "beam_state.hpp"
#include "numeric.hpp"
#include "special_functions.hpp"

namespace revb {

using cplx_ld = std::complex<long double>;

enum class IndicialRoot { regular, irregular };

/// Raised when a recurrence denominator vanishes with a nonzero numerator.
class singular_recurrence : public numerical_error {
 public:
  singular_recurrence(int k, const std::string& what) : numerical_error(what), k_(k) {}
  [[nodiscard]] int index() const { return k_; }

 private:
  int k_;
};

/// (regular-at-origin root, other root): (n, -n-1) for n >= 0, (-n-1, n) for n < 0.
constexpr std::pair<int, int> indicial_roots(int n) {
  if (n >= 0) return {n, -n - 1};
  return {-n - 1, n};
}

struct RadialSeries {
  int n = 0;
  int alpha = 0;
  DerivedKinematics kinematics;
  cplx lambda;
  cplx c0;  // seed of the chain that starts at k = 0
  std::array<std::vector<cplx_ld>, 4> coefficients;

  [[nodiscard]] int max_index() const { return static_cast<int>(coefficients[0].size()) - 1; }
  /// Component index (0-based) of the chain seeded at k = 0: psi_1 when alpha == n.
  [[nodiscard]] int leading_component() const { return alpha == n ? 0 : 1; }
};

namespace detail {

inline cplx_ld to_ld(cplx v) { return {v.real(), v.imag()}; }

inline cplx_ld checked_divide(cplx_ld num, long double den, int k, const char* which) {
  if (den == 0.0L) {
    if (num == cplx_ld(0)) return 0;
    throw singular_recurrence(k, std::string("run_recurrence: singular denominator in ") + which +
                                     " at k = " + std::to_string(k));
  }
  return num / den;
}

}  // namespace detail

/// Builds C^s_k for k = 0..max_k.
///
/// alpha == n: C1_0 = c0, C3_0 = c0 / lambda, C2_0 = C4_0 = 0; even-k C1 from
/// the two-step ratio C1_k / C1_{k-2} = -kappa^2 / ((a+k+n)(a+k-n)).
/// alpha == -n-1: C2_0 = c0, C4_0 = mu c0 with mu fixed by lambda.
inline RadialSeries run_recurrence(int n, const DerivedKinematics& kin, cplx lambda_free, int max_k,
                                   cplx c0 = 1.0, IndicialRoot root = IndicialRoot::regular) {
  if (max_k < 2) throw std::invalid_argument("run_recurrence: need max_k >= 2");
  if (lambda_free == cplx(0.0)) throw std::invalid_argument("run_recurrence: lambda must be nonzero");
  const auto [reg, irr] = indicial_roots(n);
  RadialSeries out;
  out.n = n;
  out.alpha = root == IndicialRoot::regular ? reg : irr;
  out.kinematics = kin;
  out.lambda = lambda_free;
  out.c0 = c0;
  for (auto& c : out.coefficients) c.assign(max_k + 1, cplx_ld(0));
  auto& c1 = out.coefficients[0];
  auto& c2 = out.coefficients[1];
  auto& c3 = out.coefficients[2];
  auto& c4 = out.coefficients[3];

  const long double a = out.alpha;
  const long double kz = kin.k_z;
  const long double ep = static_cast<long double>(kin.energy) + kin.mass;
  const long double em = kin.kinetic();
  const long double kappa2 = static_cast<long double>(kin.p_kappa) * kin.p_kappa;
  const cplx_ld lam = detail::to_ld(lambda_free);
  const cplx_ld I(0, 1);
  // transfer factors from the psi_1 chain into psi_2 and psi_4
  const cplx_ld to_c2 = -I * (lam * kz - ep) / lam;
  const cplx_ld to_c4 = -I * (kz - lam * em) / lam;

  auto fill_b_from_a = [&](int k) {
    const long double den = a + k + n + 1;
    c2[k] = detail::checked_divide(c1[k - 1] * to_c2, den, k, "C2");
    c4[k] = detail::checked_divide(c1[k - 1] * to_c4, den, k, "C4");
  };

  if (out.alpha == n) {
    c1[0] = detail::to_ld(c0);
    c3[0] = c1[0] / lam;
    for (int k = 1; k <= max_k; ++k) {
      fill_b_from_a(k);
      if (k >= 2) {
        const long double den = (a + k + n) * (a + k - n);
        c1[k] = detail::checked_divide(-kappa2 * c1[k - 2], den, k, "C1");
      }
      c3[k] = c1[k] / lam;
    }
  } else {
    const cplx_ld pivot = lam * kz - ep;
    if (pivot == cplx_ld(0)) {
      throw std::invalid_argument("run_recurrence: lambda * k_z == E + m leaves the C2 chain undetermined");
    }
    const cplx_ld mu = (kz - lam * em) / pivot;
    const cplx_ld to_c1 = -I * lam * kappa2 / pivot;
    c2[0] = detail::to_ld(c0);
    c4[0] = mu * c2[0];
    for (int k = 1; k <= max_k; ++k) {
      const long double den = a + k - n;
      c1[k] = detail::checked_divide(c2[k - 1] * to_c1, den, k, "C1");
      c3[k] = c1[k] / lam;
      fill_b_from_a(k);
    }
  }
  return out;
}

/// Largest relative defect of the coupled recurrences (and the indicial
/// equations at k = 0) over the table; each equation is scaled by the sum of
/// the magnitudes of its terms.
inline double resubstitution_residual(const RadialSeries& s) {
  const auto& c1 = s.coefficients[0];
  const auto& c2 = s.coefficients[1];
  const auto& c3 = s.coefficients[2];
  const auto& c4 = s.coefficients[3];
  const long double a = s.alpha;
  const int n = s.n;
  const long double kz = s.kinematics.k_z;
  const long double ep = static_cast<long double>(s.kinematics.energy) + s.kinematics.mass;
  const long double em = s.kinematics.kinetic();
  const cplx_ld I(0, 1);
  long double worst = 0;
  auto check = [&](std::initializer_list<cplx_ld> terms) {
    cplx_ld sum = 0;
    long double scale = 0;
    for (const auto& t : terms) {
      sum += t;
      scale += std::abs(t);
    }
    if (scale > 0) worst = std::max(worst, std::abs(sum) / scale);
  };
  check({(a - n) * c1[0]});
  check({(a + n + 1) * c2[0]});
  check({(a - n) * c3[0]});
  check({(a + n + 1) * c4[0]});
  for (int k = 1; k <= s.max_index(); ++k) {
    check({(a + k - n) * c1[k], -I * kz * c2[k - 1], -I * ep * c4[k - 1]});
    check({(a + k + n + 1) * c2[k], I * kz * c1[k - 1], -I * ep * c3[k - 1]});
    check({(a + k - n) * c3[k], -I * kz * c4[k - 1], -I * em * c2[k - 1]});
    check({(a + k + n + 1) * c4[k], I * kz * c3[k - 1], -I * em * c1[k - 1]});
  }
  return static_cast<double>(worst);
}

/// Number of coefficients that are not exactly zero although parity forbids
/// them: the chain seeded at k = 0 has only even powers, the other chain
/// only odd ones.
inline int parity_violations(const RadialSeries& s) {
  const int lead = s.leading_component();
  int count = 0;
  for (int comp = 0; comp < 4; ++comp) {
    const bool even_chain = (comp % 2) == lead;
    for (int k = 0; k <= s.max_index(); ++k) {
      const bool allowed = (k % 2 == 0) == even_chain;
      if (!allowed && s.coefficients[comp][k] != cplx_ld(0)) ++count;
    }
  }
  return count;
}

/// max_k |C1_k / C3_k - lambda| / |lambda| over populated indices.
inline double lambda_ratio_deviation(const RadialSeries& s) {
  const cplx_ld lam = detail::to_ld(s.lambda);
  long double worst = 0;
  for (int k = 0; k <= s.max_index(); ++k) {
    if (s.coefficients[2][k] == cplx_ld(0)) continue;
    worst = std::max(worst, std::abs(s.coefficients[0][k] / s.coefficients[2][k] - lam) / std::abs(lam));
  }
  return static_cast<double>(worst);
}

/// C1_{2m} = C0 (-1)^m kappa^{2m} / (4^m m! (n+1)(n+2)...(n+m)).
///
/// Direct products up to m = 15, log-gamma above to stay clear of overflow.
inline cplx closed_form_c2m(int n, int m_index, double kappa, cplx c0) {
  if (n < 0) throw std::invalid_argument("closed_form_c2m: n must be >= 0");
  if (m_index < 0) throw std::invalid_argument("closed_form_c2m: m must be >= 0");
  if (!(kappa > 0.0)) throw std::invalid_argument("closed_form_c2m: kappa must be > 0");
  long double mag = 0;
  if (m_index <= 15) {
    mag = 1;
    const long double q = static_cast<long double>(kappa) * kappa / 4;
    for (int j = 1; j <= m_index; ++j) mag *= q / (static_cast<long double>(j) * (n + j));
  } else {
    const long double lg = 2.0L * m_index * std::log(static_cast<long double>(kappa) / 2) -
                           std::lgamma(static_cast<long double>(m_index) + 1) -
                           (std::lgamma(static_cast<long double>(n + m_index) + 1) -
                            std::lgamma(static_cast<long double>(n) + 1));
    mag = std::exp(lg);
  }
  const double sign = (m_index % 2 == 0) ? 1.0 : -1.0;
  return c0 * (sign * static_cast<double>(mag));
}

/// The classical seed 1 / (2^{n-1} Gamma(n)); undefined for n <= 0.
inline double canonical_c0(int n) {
  if (n <= 0) throw std::domain_error("canonical_c0: Gamma(n) has a pole for n <= 0; supply C0 explicitly");
  return 1.0 / (std::ldexp(1.0, n - 1) * std::tgamma(static_cast<double>(n)));
}

/// kappa^n / (2^n n!): the seed for which R1 is exactly J_n(kappa r).
inline double bessel_normalized_c0(int n, double kappa) {
  if (n < 0) throw std::invalid_argument("bessel_normalized_c0: n must be >= 0");
  long double v = 1;
  for (int j = 1; j <= n; ++j) v *= static_cast<long double>(kappa) / (2.0L * j);
  return static_cast<double>(v);
}

/// Seed c0 that makes the series reproduce the Bessel-spinor amplitudes
/// (J_n, a J_{n+1}, J_n / lambda, d J_{n+1}) for either sign of n.
inline cplx bessel_matched_seed(int n, const DerivedKinematics& kin, cplx lambda) {
  if (n >= 0) return bessel_normalized_c0(n, kin.p_kappa);
  const int alpha = -n - 1;
  const cplx a2 = free_lambda_amplitudes(kin, lambda)[1];
  // J_{n+1} = J_{-alpha} = (-1)^alpha J_alpha
  const double parity = (alpha % 2 == 0) ? 1.0 : -1.0;
  return a2 * parity * bessel_normalized_c0(alpha, kin.p_kappa);
}

/// Largest r at which every component's last populated term is below
/// rel_tol times the l1 sum of that component's terms.
inline double certified_radius(const RadialSeries& s, double rel_tol = 1e-15) {
  auto certified_at = [&](long double r) {
    for (const auto& c : s.coefficients) {
      int last = s.max_index();
      while (last >= 0 && c[last] == cplx_ld(0)) --last;
      if (last <= 0) continue;
      long double l1 = 0;
      long double p = 1;
      long double tail = 0;
      for (int k = 0; k <= last; ++k) {
        const long double t = std::abs(c[k]) * p;
        l1 += t;
        if (k == last) tail = t;
        p *= r;
      }
      if (tail > rel_tol * l1) return false;
    }
    return true;
  };
  long double lo = 0;
  long double hi = 1;
  while (certified_at(hi) && hi < 1e6L) {
    lo = hi;
    hi *= 2;
  }
  for (int it = 0; it < 80; ++it) {
    const long double mid = 0.5L * (lo + hi);
    (certified_at(mid) ? lo : hi) = mid;
  }
  return static_cast<double>(lo);
}

/// (R1, R2, R3, R4)(r) = r^alpha sum_k C_k r^k by compensated Horner on the
/// real and imaginary parts.
inline Spinor radial_eval(const RadialSeries& s, double r) {
  if (!(r >= 0.0)) throw std::domain_error("radial_eval: r must be >= 0");
  if (s.alpha < 0 && r == 0.0) throw std::domain_error("radial_eval: irregular root is singular at r = 0");
  if (r > certified_radius(s)) {
    throw std::domain_error("radial_eval: r = " + std::to_string(r) +
                            " is beyond the certified convergence radius of the series");
  }
  Spinor out{};
  std::vector<long double> re(s.max_index() + 1);
  std::vector<long double> im(s.max_index() + 1);
  const long double rl = r;
  const long double prefactor = s.alpha == 0 ? 1.0L : std::pow(rl, static_cast<long double>(s.alpha));
  for (int comp = 0; comp < 4; ++comp) {
    for (int k = 0; k <= s.max_index(); ++k) {
      re[k] = s.coefficients[comp][k].real();
      im[k] = s.coefficients[comp][k].imag();
    }
    const long double vr = numeric::compensated_horner<long double>(re, rl);
    const long double vi = numeric::compensated_horner<long double>(im, rl);
    out[comp] = cplx(static_cast<double>(prefactor * vr), static_cast<double>(prefactor * vi));
  }
  return out;
}

struct BesselIdentification {
  double max_relative_error = 0;  // sup-norm relative, worst component
  std::array<double, 4> per_component{};
  double certified_kappa_r = 0;
};

/// Compares the series against (J_n, a J_{n+1}, J_n/lambda, d J_{n+1}) on
/// `samples` equally spaced points of kappa r in [0, kappa_r_max]. Errors are
/// relative to the sup norm of each reference component.
inline BesselIdentification verify_bessel_identification(int n, const DerivedKinematics& kin, int max_k,
                                                         double kappa_r_max = 20.0, int samples = 401) {
  const cplx lambda = kin.lambda_param;
  const RadialSeries s = run_recurrence(n, kin, lambda, max_k, bessel_matched_seed(n, kin, lambda));
  const auto amp = free_lambda_amplitudes(kin, lambda);
  const BesselSpinorProfile reference(n, kin.p_kappa, kin.k_z, amp);
  BesselIdentification out;
  out.certified_kappa_r = certified_radius(s) * kin.p_kappa;
  std::array<double, 4> err{};
  std::array<double, 4> sup{};
  for (int i = 0; i < samples; ++i) {
    const double r = (kappa_r_max / kin.p_kappa) * i / (samples - 1);
    const Spinor got = radial_eval(s, r);
    const Spinor want = reference.radial(r);
    for (int c = 0; c < 4; ++c) {
      err[c] = std::max(err[c], std::abs(got[c] - want[c]));
      sup[c] = std::max(sup[c], std::abs(want[c]));
    }
  }
  for (int c = 0; c < 4; ++c) {
    out.per_component[c] = sup[c] > 0 ? err[c] / sup[c] : err[c];
    out.max_relative_error = std::max(out.max_relative_error, out.per_component[c]);
  }
  return out;
}

/// Worst relative deviation between closed_form_c2m and the recurrence's
/// C1_{2m} for m = 0..m_max (n >= 0, same seed).
inline double closed_form_vs_recurrence(int n, const DerivedKinematics& kin, int m_max, cplx c0 = 1.0) {
  const RadialSeries s = run_recurrence(n, kin, kin.lambda_param, 2 * m_max + 1, c0);
  long double worst = 0;
  for (int m = 0; m <= m_max; ++m) {
    const cplx_ld rec = s.coefficients[0][2 * m];
    const cplx cf = closed_form_c2m(n, m, kin.p_kappa, c0);
    worst = std::max(worst, std::abs(rec - detail::to_ld(cf)) / std::abs(rec));
  }
  return static_cast<double>(worst);
}

}  // namespace revb
