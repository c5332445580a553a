#pragma once

// Dirac-Pauli representation: beta = diag(I, -I), alpha_j = offdiag(sigma_j),
// gamma^0 = beta, gamma^j = [[0, sigma_j], [-sigma_j, 0]].

#include <array>
#include <complex>

#include "numeric.hpp"

namespace revb {

using Spinor = std::array<cplx, 4>;
using Matrix4 = std::array<std::array<cplx, 4>, 4>;
using Matrix2 = std::array<std::array<cplx, 2>, 2>;

namespace dirac {

inline constexpr cplx I{0.0, 1.0};

constexpr Matrix4 zero4() { return {}; }

constexpr Matrix4 identity4() {
  Matrix4 m{};
  for (int i = 0; i < 4; ++i) m[i][i] = 1.0;
  return m;
}

constexpr Matrix2 pauli(int j) {
  switch (j) {
    case 1:
      return {{{0.0, 1.0}, {1.0, 0.0}}};
    case 2:
      return {{{0.0, -I}, {I, 0.0}}};
    default:
      return {{{1.0, 0.0}, {0.0, -1.0}}};
  }
}

constexpr Matrix4 block(const Matrix2& ul, const Matrix2& ur, const Matrix2& ll, const Matrix2& lr) {
  Matrix4 m{};
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      m[i][j] = ul[i][j];
      m[i][j + 2] = ur[i][j];
      m[i + 2][j] = ll[i][j];
      m[i + 2][j + 2] = lr[i][j];
    }
  }
  return m;
}

constexpr Matrix2 scaled(const Matrix2& a, cplx s) {
  Matrix2 r{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) r[i][j] = a[i][j] * s;
  return r;
}

constexpr Matrix4 operator*(const Matrix4& a, const Matrix4& b) {
  Matrix4 r{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k) r[i][j] += a[i][k] * b[k][j];
  return r;
}

constexpr Matrix4 operator*(cplx s, const Matrix4& a) {
  Matrix4 r{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) r[i][j] = s * a[i][j];
  return r;
}

constexpr Matrix4 operator+(const Matrix4& a, const Matrix4& b) {
  Matrix4 r{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) r[i][j] = a[i][j] + b[i][j];
  return r;
}

constexpr Spinor operator*(const Matrix4& a, const Spinor& v) {
  Spinor r{};
  for (int i = 0; i < 4; ++i)
    for (int k = 0; k < 4; ++k) r[i] += a[i][k] * v[k];
  return r;
}

constexpr Matrix2 zero2() { return {}; }
constexpr Matrix2 identity2() { return {{{1.0, 0.0}, {0.0, 1.0}}}; }

inline constexpr Matrix4 beta() { return block(identity2(), zero2(), zero2(), scaled(identity2(), -1.0)); }
inline constexpr Matrix4 alpha(int j) { return block(zero2(), pauli(j), pauli(j), zero2()); }
/// Sigma_j = diag(sigma_j, sigma_j).
inline constexpr Matrix4 spin(int j) { return block(pauli(j), zero2(), zero2(), pauli(j)); }
inline constexpr Matrix4 gamma(int mu) {
  if (mu == 0) return beta();
  return block(zero2(), pauli(mu), scaled(pauli(mu), -1.0), zero2());
}

}  // namespace dirac
}  // namespace revb
