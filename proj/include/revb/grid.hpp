#pragma once

// Radial grids (no node on the axis) and the spinor fields sampled on them.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <memory>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "beam_state.hpp"
#include "numeric.hpp"

namespace revb {

enum class SpacingRule { uniform_offset, chebyshev };

inline std::string_view to_string(SpacingRule s) { return s == SpacingRule::uniform_offset ? "uniform-offset" : "chebyshev"; }

inline constexpr int kMinGridCount = 32;

/// Nodes on (0, r_outer):
///   uniform-offset  r_i = (i + 1/2) h,  h = r_outer / count
///   chebyshev       r_i = r_outer (1 - cos t_i) / 2,  t_i = pi (i + 1/2) / count
/// d/dr uses 5-point Fornberg stencils, centred where possible and one-sided
/// at both ends.
class RadialGrid {
 public:
  RadialGrid(double r_outer, int count, SpacingRule rule = SpacingRule::uniform_offset)
      : r_outer_(r_outer), count_(count), rule_(rule) {
    if (!(r_outer > 0.0) || !std::isfinite(r_outer)) throw std::invalid_argument("RadialGrid: r_outer must be > 0");
    if (count < kMinGridCount) {
      throw std::invalid_argument("RadialGrid: grid too coarse (count = " + std::to_string(count) + " < 32)");
    }
    nodes_.resize(count);
    weights_.resize(count);
    const double h = r_outer / count;
    for (int i = 0; i < count; ++i) {
      if (rule == SpacingRule::uniform_offset) {
        nodes_[i] = (i + 0.5) * h;
        weights_[i] = h;
      } else {
        const double t = std::numbers::pi * (i + 0.5) / count;
        nodes_[i] = 0.5 * r_outer * (1.0 - std::cos(t));
        weights_[i] = 0.5 * r_outer * std::sin(t) * std::numbers::pi / count;
      }
    }
    stencil_start_.resize(count);
    stencil_.resize(count);
    for (int i = 0; i < count; ++i) {
      const int start = std::clamp(i - 2, 0, count - 5);
      stencil_start_[i] = start;
      const auto w = numeric::fornberg_weights(nodes_[i], std::span<const double>(nodes_).subspan(start, 5), 1);
      std::copy(w.begin(), w.end(), stencil_[i].begin());
    }
  }

  [[nodiscard]] int count() const { return count_; }
  [[nodiscard]] SpacingRule rule() const { return rule_; }
  [[nodiscard]] double r_outer() const { return r_outer_; }
  [[nodiscard]] double r_min() const { return nodes_.front(); }
  [[nodiscard]] double r_max() const { return nodes_.back(); }
  /// Nominal spacing r_outer / count (exact for uniform-offset).
  [[nodiscard]] double spacing() const { return r_outer_ / count_; }
  [[nodiscard]] const std::vector<double>& nodes() const { return nodes_; }
  /// Quadrature weights in r (midpoint rule, or midpoint in t for chebyshev).
  [[nodiscard]] const std::vector<double>& weights() const { return weights_; }

  template <typename T>
  [[nodiscard]] std::vector<T> derivative(std::span<const T> f) const {
    if (static_cast<int>(f.size()) != count_) throw std::invalid_argument("RadialGrid::derivative: size mismatch");
    std::vector<T> out(count_);
    for (int i = 0; i < count_; ++i) {
      const int s = stencil_start_[i];
      T acc{};
      for (int j = 0; j < 5; ++j) acc += stencil_[i][j] * f[s + j];
      out[i] = acc;
    }
    return out;
  }

 private:
  double r_outer_;
  int count_;
  SpacingRule rule_;
  std::vector<double> nodes_;
  std::vector<double> weights_;
  std::vector<int> stencil_start_;
  std::vector<std::array<double, 5>> stencil_;
};

using GridPtr = std::shared_ptr<const RadialGrid>;

inline GridPtr make_grid(double r_outer, int count, SpacingRule rule = SpacingRule::uniform_offset) {
  return std::make_shared<const RadialGrid>(r_outer, count, rule);
}

/// psi_s(r, theta, z) = R_s(r_i) e^{i (n + shift_s) theta} e^{i k_z z}, stored by radial profile.
struct ModeField {
  int n = 0;
  double k_z = 0;
  GridPtr grid;
  std::array<std::vector<cplx>, 4> radial;

  [[nodiscard]] int azimuthal_index(int s) const { return n + kAzimuthalShift[s]; }
  [[nodiscard]] int size() const { return grid->count(); }
};

template <ModeState S>
ModeField sample(const S& state, const GridPtr& grid) {
  ModeField f{state.n(), state.k_z(), grid, {}};
  for (auto& c : f.radial) c.resize(grid->count());
  for (int i = 0; i < grid->count(); ++i) {
    const Spinor v = state.radial(grid->nodes()[i]);
    for (int s = 0; s < 4; ++s) f.radial[s][i] = v[s];
  }
  return f;
}

namespace detail {
inline void require_compatible(const ModeField& a, const ModeField& b) {
  if (a.grid != b.grid || a.n != b.n || a.k_z != b.k_z) {
    throw std::invalid_argument("ModeField: fields live on different grids or modes");
  }
}
}  // namespace detail

/// a + s b
inline ModeField combine(const ModeField& a, cplx s, const ModeField& b) {
  detail::require_compatible(a, b);
  ModeField out = a;
  for (int c = 0; c < 4; ++c)
    for (int i = 0; i < a.size(); ++i) out.radial[c][i] += s * b.radial[c][i];
  return out;
}

inline ModeField scaled(const ModeField& a, cplx s) {
  ModeField out = a;
  for (auto& c : out.radial)
    for (auto& v : c) v *= s;
  return out;
}

/// <a|b> per unit angle and length: sum_i w_i r_i sum_s conj(a_s) b_s.
inline cplx inner(const ModeField& a, const ModeField& b) {
  detail::require_compatible(a, b);
  numeric::CompensatedSum<cplx> acc;
  const auto& r = a.grid->nodes();
  const auto& w = a.grid->weights();
  for (int i = 0; i < a.size(); ++i) {
    cplx local = 0;
    for (int s = 0; s < 4; ++s) local += std::conj(a.radial[s][i]) * b.radial[s][i];
    acc.add(w[i] * r[i] * local);
  }
  return acc.value();
}

inline double norm(const ModeField& a) { return std::sqrt(std::max(0.0, inner(a, a).real())); }

/// Full (r, theta) sampling at z = 0, used when theta derivatives are taken
/// by finite differences instead of analytically.
struct PolarField {
  double k_z = 0;
  GridPtr grid;
  int angles = 0;
  std::array<std::vector<cplx>, 4> values;  // index i * angles + j

  [[nodiscard]] double theta(int j) const { return 2.0 * std::numbers::pi * j / angles; }
  [[nodiscard]] std::size_t index(int i, int j) const { return static_cast<std::size_t>(i) * angles + j; }
};

template <ModeState S>
PolarField sample_polar(const S& state, const GridPtr& grid, int angles) {
  if (angles < 8) throw std::invalid_argument("sample_polar: need at least 8 angles");
  PolarField f{state.k_z(), grid, angles, {}};
  for (auto& c : f.values) c.resize(static_cast<std::size_t>(grid->count()) * angles);
  for (int i = 0; i < grid->count(); ++i) {
    const Spinor rad = state.radial(grid->nodes()[i]);
    for (int j = 0; j < angles; ++j) {
      for (int s = 0; s < 4; ++s) {
        f.values[s][f.index(i, j)] = rad[s] * std::polar(1.0, (state.n() + kAzimuthalShift[s]) * f.theta(j));
      }
    }
  }
  return f;
}

inline double norm(const PolarField& f) {
  numeric::CompensatedSum<double> acc;
  const auto& r = f.grid->nodes();
  const auto& w = f.grid->weights();
  const double dtheta = 2.0 * std::numbers::pi / f.angles;
  for (int i = 0; i < f.grid->count(); ++i) {
    double local = 0;
    for (int j = 0; j < f.angles; ++j)
      for (int s = 0; s < 4; ++s) local += std::norm(f.values[s][f.index(i, j)]);
    acc.add(w[i] * r[i] * dtheta * local);
  }
  return std::sqrt(acc.value());
}

}  // namespace revb
