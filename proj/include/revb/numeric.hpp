#pragma once

// Floating-point building blocks shared by the rest of the library:
// error-free transforms, compensated accumulation, compensated Horner
// evaluation and Fornberg finite-difference weights.

#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace revb {

using cplx = std::complex<double>;

/// Raised when an iterative numerical procedure fails to reach its tolerance.
class numerical_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace numeric {

template <typename T>
struct TwoTerm {
  T value;
  T error;
};

// Knuth's TwoSum: a + b = value + error exactly.
template <typename T>
constexpr TwoTerm<T> two_sum(T a, T b) {
  const T s = a + b;
  const T bb = s - a;
  const T err = (a - (s - bb)) + (b - bb);
  return {s, err};
}

template <typename T>
inline TwoTerm<T> two_prod(T a, T b) {
  const T p = a * b;
  return {p, std::fma(a, b, -p)};
}

/// Neumaier-compensated running sum.
template <typename T>
class CompensatedSum {
 public:
  void add(T x) {
    const T t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  [[nodiscard]] T value() const { return sum_ + comp_; }

 private:
  T sum_{0};
  T comp_{0};
};

template <typename T>
class CompensatedSum<std::complex<T>> {
 public:
  void add(std::complex<T> x) {
    re_.add(x.real());
    im_.add(x.imag());
  }
  [[nodiscard]] std::complex<T> value() const { return {re_.value(), im_.value()}; }

 private:
  CompensatedSum<T> re_;
  CompensatedSum<T> im_;
};

/// Compensated Horner scheme (Graillat, Langlois, Louvet): the result is as
/// accurate as if computed in twice the working precision.
/// coeffs[k] multiplies x^k.
template <typename T>
T compensated_horner(std::span<const T> coeffs, T x) {
  if (coeffs.empty()) return T(0);
  T s = coeffs.back();
  T c = 0;
  for (std::size_t i = coeffs.size() - 1; i-- > 0;) {
    const auto [p, pe] = two_prod(s, x);
    const auto [t, se] = two_sum(p, coeffs[i]);
    s = t;
    c = c * x + (pe + se);
  }
  return s + c;
}

/// Fornberg's algorithm: weights w such that f^(m)(x0) ~ sum_j w[j] f(nodes[j]).
inline std::vector<double> fornberg_weights(double x0, std::span<const double> nodes,
                                            int derivative) {
  const int n = static_cast<int>(nodes.size());
  if (n <= derivative) {
    throw std::invalid_argument("fornberg_weights: need more nodes than the derivative order");
  }
  const int m = derivative;
  // c[j][k]: weight of node j for derivative k
  std::vector<std::vector<double>> c(n, std::vector<double>(m + 1, 0.0));
  double c1 = 1.0;
  double c4 = nodes[0] - x0;
  c[0][0] = 1.0;
  for (int i = 1; i < n; ++i) {
    const int mn = std::min(i, m);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = nodes[i] - x0;
    for (int j = 0; j < i; ++j) {
      const double c3 = nodes[i] - nodes[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) {
          c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
        }
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (int k = mn; k >= 1; --k) {
        c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
      }
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(n);
  for (int j = 0; j < n; ++j) w[j] = c[j][m];
  return w;
}

}  // namespace numeric
}  // namespace revb
