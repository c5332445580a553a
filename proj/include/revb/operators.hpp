#pragma once

// First-order differential operators on Dirac spinors, written as
//
//   O = (Rc cos t + Rs sin t) d/dr + (Ac cos t + As sin t) (1/r) d/dt
//       + T d/dt + Mz d/dz + C
//
// with constant 4x4 matrices. Anything built from Cartesian derivatives
// Mx d/dx + My d/dy maps to Rc = Mx, Rs = My, Ac = My, As = -Mx.
//
// Three engines apply an operator:
//   mode   - on ModeField, d/dt and d/dz analytic, radial FD (default)
//   polar  - on PolarField, periodic FD in theta as well
//   point  - at single points, with either cylindrical or Cartesian stencils

#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "beam_state.hpp"
#include "dirac_matrices.hpp"
#include "grid.hpp"
#include "numeric.hpp"

namespace revb {

/// The operator mixes azimuthal modes in a way the (0, 1, 0, 1) layout cannot absorb.
class mode_structure_error : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class axis_intrusion : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

struct DiracOperator {
  std::string id;
  Matrix4 radial_cos{};
  Matrix4 radial_sin{};
  Matrix4 angular_cos{};
  Matrix4 angular_sin{};
  Matrix4 theta{};
  Matrix4 dz{};
  Matrix4 constant{};

  static DiracOperator from_cartesian(std::string id, const Matrix4& mx, const Matrix4& my, const Matrix4& mz,
                                      const Matrix4& c) {
    DiracOperator op;
    op.id = std::move(id);
    op.radial_cos = mx;
    op.radial_sin = my;
    op.angular_cos = my;
    op.angular_sin = dirac::operator*(cplx(-1.0), mx);
    op.dz = mz;
    op.constant = c;
    return op;
  }

  /// True when the transverse part is Mx d/dx + My d/dy with no bare d/dtheta
  /// (required by the Cartesian engine).
  [[nodiscard]] bool is_cartesian() const {
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        if (angular_cos[i][j] != radial_sin[i][j] || angular_sin[i][j] != -radial_cos[i][j] || theta[i][j] != cplx(0))
          return false;
    return true;
  }
};

namespace ops {

using dirac::operator*;
using dirac::operator+;

/// H = alpha . p + m beta.
inline DiracOperator hamiltonian(double mass) {
  const cplx mi(0, -1);
  return DiracOperator::from_cartesian("H", mi * dirac::alpha(1), mi * dirac::alpha(2), mi * dirac::alpha(3),
                                       cplx(mass) * dirac::beta());
}

/// Sigma . p.
inline DiracOperator helicity() {
  const cplx mi(0, -1);
  return DiracOperator::from_cartesian("helicity", mi * dirac::spin(1), mi * dirac::spin(2), mi * dirac::spin(3),
                                       {});
}

/// Sigma_z p_z.
inline DiracOperator longitudinal_helicity() {
  return DiracOperator::from_cartesian("sigma_z p_z", {}, {}, cplx(0, -1) * dirac::spin(3), {});
}

inline DiracOperator momentum_z() {
  return DiracOperator::from_cartesian("p_z", {}, {}, cplx(0, -1) * dirac::identity4(), {});
}

inline DiracOperator orbital_z() {
  DiracOperator op;
  op.id = "L_z";
  op.theta = cplx(0, -1) * dirac::identity4();
  return op;
}

inline DiracOperator spin_z() {
  DiracOperator op;
  op.id = "S_z";
  op.constant = cplx(0.5) * dirac::spin(3);
  return op;
}

inline DiracOperator total_angular_momentum_z() {
  DiracOperator op = orbital_z();
  op.id = "J_z";
  op.constant = cplx(0.5) * dirac::spin(3);
  return op;
}

}  // namespace ops

/// Orderings for the transverse conserved operator.
///   g0g3  (g1 d/dx + g2 d/dy) g0 g3
///   g3g0  (g1 d/dx + g2 d/dy) g3 g0       = -g0g3
///   tilde (g1 (cos d/dr + sin/r d/dt) + g2 (sin d/dr + cos/r d/dt)) g3 g0
/// The tilde frame does not rotate consistently and is not mode preserving.
enum class KConvention { g0g3, g3g0, tilde };

inline std::string_view to_string(KConvention c) {
  switch (c) {
    case KConvention::g0g3:
      return "g0g3";
    case KConvention::g3g0:
      return "g3g0";
    default:
      return "tilde";
  }
}

inline KConvention parse_k_convention(std::string_view s) {
  if (s == "g0g3") return KConvention::g0g3;
  if (s == "g3g0") return KConvention::g3g0;
  if (s == "tilde") return KConvention::tilde;
  throw std::invalid_argument("unknown K convention '" + std::string(s) + "'");
}

inline constexpr std::array<KConvention, 3> kAllKConventions{KConvention::g0g3, KConvention::g3g0,
                                                              KConvention::tilde};

namespace ops {

inline DiracOperator k_operator(KConvention conv) {
  using dirac::gamma;
  const std::string id = "K[" + std::string(to_string(conv)) + "]";
  if (conv == KConvention::tilde) {
    const Matrix4 tail = gamma(3) * gamma(0);
    DiracOperator op;
    op.id = id;
    op.radial_cos = gamma(1) * tail;
    op.radial_sin = gamma(2) * tail;
    op.angular_cos = gamma(2) * tail;
    op.angular_sin = gamma(1) * tail;
    return op;
  }
  const Matrix4 tail = conv == KConvention::g0g3 ? gamma(0) * gamma(3) : gamma(3) * gamma(0);
  return DiracOperator::from_cartesian(id, gamma(1) * tail, gamma(2) * tail, {}, {});
}

}  // namespace ops

// ---------------------------------------------------------------------------
// mode engine

namespace detail {

inline bool nonzero(cplx v) { return std::abs(v) > 1e-14; }

struct ModeCoefficients {
  Matrix4 raise_d{}, raise_a{}, lower_d{}, lower_a{};  // multiply R' and (i m / r) R
};

inline ModeCoefficients mode_coefficients(const DiracOperator& op) {
  const cplx I(0, 1);
  ModeCoefficients m;
  for (int s = 0; s < 4; ++s) {
    for (int t = 0; t < 4; ++t) {
      m.raise_d[s][t] = 0.5 * (op.radial_cos[s][t] - I * op.radial_sin[s][t]);
      m.raise_a[s][t] = 0.5 * (op.angular_cos[s][t] - I * op.angular_sin[s][t]);
      m.lower_d[s][t] = 0.5 * (op.radial_cos[s][t] + I * op.radial_sin[s][t]);
      m.lower_a[s][t] = 0.5 * (op.angular_cos[s][t] + I * op.angular_sin[s][t]);
    }
  }
  return m;
}

inline void check_mode_structure(const DiracOperator& op, const ModeCoefficients& m) {
  for (int s = 0; s < 4; ++s) {
    for (int t = 0; t < 4; ++t) {
      const int gap = kAzimuthalShift[s] - kAzimuthalShift[t];
      const bool bad = (gap != 1 && (nonzero(m.raise_d[s][t]) || nonzero(m.raise_a[s][t]))) ||
                       (gap != -1 && (nonzero(m.lower_d[s][t]) || nonzero(m.lower_a[s][t]))) ||
                       (gap != 0 && (nonzero(op.theta[s][t]) || nonzero(op.dz[s][t]) ||
                                     nonzero(op.constant[s][t])));
      if (bad) {
        throw mode_structure_error("operator " + op.id + " couples components " + std::to_string(s + 1) + " and " +
                                   std::to_string(t + 1) + " across incompatible azimuthal modes");
      }
    }
  }
}

}  // namespace detail

/// Whether op maps the (n, n+1, n, n+1) mode layout into itself.
inline bool is_mode_preserving(const DiracOperator& op) {
  try {
    detail::check_mode_structure(op, detail::mode_coefficients(op));
    return true;
  } catch (const mode_structure_error&) {
    return false;
  }
}

inline ModeField apply(const DiracOperator& op, const ModeField& f) {
  const auto mc = detail::mode_coefficients(op);
  detail::check_mode_structure(op, mc);
  const cplx I(0, 1);
  const int count = f.size();
  const auto& r = f.grid->nodes();
  std::array<std::vector<cplx>, 4> d;
  for (int t = 0; t < 4; ++t) d[t] = f.grid->derivative<cplx>(f.radial[t]);
  ModeField out{f.n, f.k_z, f.grid, {}};
  for (auto& c : out.radial) c.assign(count, cplx(0));
  for (int s = 0; s < 4; ++s) {
    for (int t = 0; t < 4; ++t) {
      const int gap = kAzimuthalShift[s] - kAzimuthalShift[t];
      const double mt = f.azimuthal_index(t);
      cplx cd = 0;     // times R'
      cplx ca = 0;     // times (i m_t / r) R
      cplx cflat = 0;  // times R
      if (gap == 1) {
        cd = mc.raise_d[s][t];
        ca = mc.raise_a[s][t];
      } else if (gap == -1) {
        cd = mc.lower_d[s][t];
        ca = mc.lower_a[s][t];
      } else {
        cflat = op.theta[s][t] * (I * mt) + op.dz[s][t] * (I * f.k_z) + op.constant[s][t];
      }
      if (cd == cplx(0) && ca == cplx(0) && cflat == cplx(0)) continue;
      for (int i = 0; i < count; ++i) {
        out.radial[s][i] += cd * d[t][i] + ca * (I * mt / r[i]) * f.radial[t][i] + cflat * f.radial[t][i];
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// polar engine

namespace detail {
// 4th-order periodic central difference weights for d/dtheta.
inline constexpr std::array<double, 5> kPeriodicD1{1.0 / 12.0, -2.0 / 3.0, 0.0, 2.0 / 3.0, -1.0 / 12.0};
}  // namespace detail

/// Applies op with radial and angular finite differences; d/dz stays analytic.
/// Works for any operator, including those that are not mode preserving.
inline PolarField apply(const DiracOperator& op, const PolarField& f) {
  const int nr = f.grid->count();
  const int na = f.angles;
  const double dt = 2.0 * std::numbers::pi / na;
  const auto& r = f.grid->nodes();
  const cplx I(0, 1);
  std::array<std::vector<cplx>, 4> dr;
  std::array<std::vector<cplx>, 4> dth;
  for (int s = 0; s < 4; ++s) {
    dr[s].resize(f.values[s].size());
    dth[s].resize(f.values[s].size());
    std::vector<cplx> line(nr);
    for (int j = 0; j < na; ++j) {
      for (int i = 0; i < nr; ++i) line[i] = f.values[s][f.index(i, j)];
      const auto dl = f.grid->derivative<cplx>(line);
      for (int i = 0; i < nr; ++i) dr[s][f.index(i, j)] = dl[i];
    }
    for (int i = 0; i < nr; ++i) {
      for (int j = 0; j < na; ++j) {
        cplx acc = 0;
        for (int k = 0; k < 5; ++k) acc += detail::kPeriodicD1[k] * f.values[s][f.index(i, (j + k - 2 + na) % na)];
        dth[s][f.index(i, j)] = acc / dt;
      }
    }
  }
  PolarField out{f.k_z, f.grid, na, {}};
  for (auto& c : out.values) c.assign(f.values[0].size(), cplx(0));
  for (int i = 0; i < nr; ++i) {
    for (int j = 0; j < na; ++j) {
      const double ct = std::cos(f.theta(j));
      const double st = std::sin(f.theta(j));
      const std::size_t idx = f.index(i, j);
      for (int s = 0; s < 4; ++s) {
        cplx acc = 0;
        for (int t = 0; t < 4; ++t) {
          const cplx rad = op.radial_cos[s][t] * ct + op.radial_sin[s][t] * st;
          const cplx ang = (op.angular_cos[s][t] * ct + op.angular_sin[s][t] * st) / r[i] + op.theta[s][t];
          const cplx flat = op.dz[s][t] * (I * f.k_z) + op.constant[s][t];
          acc += rad * dr[t][idx] + ang * dth[t][idx] + flat * f.values[t][idx];
        }
        out.values[s][idx] = acc;
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// pointwise engines

struct PointwiseConfig {
  double step = 2e-3;

  void validate() const {
    if (!(step > 0.0)) throw std::invalid_argument("PointwiseConfig: step must be > 0");
  }
};

namespace detail {

inline constexpr std::array<double, 5> kCentralD1{1.0 / 12.0, -2.0 / 3.0, 0.0, 2.0 / 3.0, -1.0 / 12.0};
inline constexpr std::array<double, 5> kForwardD1{-25.0 / 12.0, 4.0, -3.0, 4.0 / 3.0, -1.0 / 4.0};

template <typename F>
Spinor stencil_derivative(const F& f, double h, bool forward) {
  Spinor acc{};
  for (int k = 0; k < 5; ++k) {
    const double offset = forward ? k * h : (k - 2) * h;
    const double w = forward ? kForwardD1[k] : kCentralD1[k];
    if (w == 0.0) continue;
    const Spinor v = f(offset);
    for (int s = 0; s < 4; ++s) acc[s] += w * v[s];
  }
  for (auto& v : acc) v /= h;
  return acc;
}

}  // namespace detail

/// Cylindrical application at one point: radial 5-point stencil (forward when
/// r < 2 step), theta and z derivatives analytic on the mode phases.
template <ModeState S>
Spinor apply_cylindrical_at(const DiracOperator& op, const S& state, const CylindricalPoint& p,
                            const PointwiseConfig& cfg = {}) {
  cfg.validate();
  if (!(p.r > 0.0)) throw axis_intrusion("apply_cylindrical_at: r must be > 0");
  const cplx I(0, 1);
  const double h = cfg.step;
  const bool forward = p.r < 2.0 * h;
  const Spinor psi = evaluate_mode_state(state, p);
  const Spinor dr = detail::stencil_derivative(
      [&](double off) { return evaluate_mode_state(state, CylindricalPoint{p.r + off, p.theta, p.z}); }, h, forward);
  Spinor dth{};
  for (int s = 0; s < 4; ++s) dth[s] = I * static_cast<double>(state.n() + kAzimuthalShift[s]) * psi[s];
  const double ct = std::cos(p.theta);
  const double st = std::sin(p.theta);
  Spinor out{};
  for (int s = 0; s < 4; ++s) {
    for (int t = 0; t < 4; ++t) {
      const cplx rad = op.radial_cos[s][t] * ct + op.radial_sin[s][t] * st;
      const cplx ang = (op.angular_cos[s][t] * ct + op.angular_sin[s][t] * st) / p.r + op.theta[s][t];
      out[s] += rad * dr[t] + ang * dth[t] + (op.dz[s][t] * (I * state.k_z()) + op.constant[s][t]) * psi[t];
    }
  }
  return out;
}

/// Cartesian application at one point with 5-point stencils along x, y and z.
/// The stencil must stay clear of the axis by at least one step.
template <typename S>
  requires requires(const S& s, const CylindricalPoint& p) {
    { s.evaluate(p) } -> std::convertible_to<Spinor>;
  }
Spinor apply_cartesian_at(const DiracOperator& op, const S& state, const CylindricalPoint& p,
                          const PointwiseConfig& cfg = {}) {
  cfg.validate();
  if (!op.is_cartesian()) {
    throw std::invalid_argument("apply_cartesian_at: operator " + op.id + " has no constant Cartesian form");
  }
  const double h = cfg.step;
  if (!(p.r > 3.0 * h)) {
    throw axis_intrusion("apply_cartesian_at: stencil reaches the z axis (r = " + std::to_string(p.r) + ")");
  }
  const double x = p.r * std::cos(p.theta);
  const double y = p.r * std::sin(p.theta);
  auto at = [&](double xx, double yy, double zz) {
    return state.evaluate(CylindricalPoint{std::hypot(xx, yy), std::atan2(yy, xx), zz});
  };
  const Spinor psi = state.evaluate(p);
  const Spinor dx = detail::stencil_derivative([&](double o) { return at(x + o, y, p.z); }, h, false);
  const Spinor dy = detail::stencil_derivative([&](double o) { return at(x, y + o, p.z); }, h, false);
  const Spinor dz = detail::stencil_derivative([&](double o) { return at(x, y, p.z + o); }, h, false);
  Spinor out{};
  for (int s = 0; s < 4; ++s) {
    for (int t = 0; t < 4; ++t) {
      // d/dtheta = x d/dy - y d/dx
      out[s] += op.radial_cos[s][t] * dx[t] + op.radial_sin[s][t] * dy[t] +
                op.theta[s][t] * (x * dy[t] - y * dx[t]) + op.dz[s][t] * dz[t] + op.constant[s][t] * psi[t];
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// complex (spherical-basis) gradient

struct CylindricalPartials {
  cplx d_r;
  cplx d_theta;
  cplx d_z;
};

/// nabla_{+1} = -(d/dx + i d/dy)/sqrt2, nabla_{-1} = (d/dx - i d/dy)/sqrt2, nabla_0 = d/dz,
/// evaluated from cylindrical partials at (r, theta).
struct SphericalGradient {
  cplx plus;
  cplx zero;
  cplx minus;
};

inline SphericalGradient complex_gradient(const CylindricalPartials& d, double r, double theta) {
  if (!(r > 0.0)) throw axis_intrusion("complex_gradient: r must be > 0");
  const cplx I(0, 1);
  const double inv_sqrt2 = 1.0 / std::numbers::sqrt2;
  return {-std::polar(inv_sqrt2, theta) * (d.d_r + I * d.d_theta / r), d.d_z,
          std::polar(inv_sqrt2, -theta) * (d.d_r - I * d.d_theta / r)};
}

/// (d/dx, d/dy, d/dz) from the spherical components.
inline std::array<cplx, 3> recombine_cartesian(const SphericalGradient& g) {
  const cplx I(0, 1);
  const double inv_sqrt2 = 1.0 / std::numbers::sqrt2;
  return {(g.minus - g.plus) * inv_sqrt2, I * (g.minus + g.plus) * inv_sqrt2, g.zero};
}

// ---------------------------------------------------------------------------
// residuals

/// ||applied - eigenvalue psi|| / ||psi||.
inline double relative_residual(const ModeField& applied, const ModeField& psi, cplx eigenvalue) {
  const double den = norm(psi);
  if (!(den > 0.0)) throw std::invalid_argument("relative_residual: zero field");
  return norm(combine(applied, -eigenvalue, psi)) / den;
}

inline double relative_residual(const PolarField& applied, const PolarField& psi, cplx eigenvalue) {
  PolarField diff = applied;
  for (int s = 0; s < 4; ++s)
    for (std::size_t k = 0; k < diff.values[s].size(); ++k) diff.values[s][k] -= eigenvalue * psi.values[s][k];
  return norm(diff) / norm(psi);
}

/// Rayleigh quotient <psi|O psi> / <psi|psi>: the eigenvalue that minimises the residual.
inline cplx best_fit_eigenvalue(const ModeField& applied, const ModeField& psi) {
  return inner(psi, applied) / inner(psi, psi);
}

struct ResidualLevel {
  int count = 0;
  double h = 0;
  double residual = 0;
};

/// Relative residuals below this are treated as rounding noise when estimating orders.
inline constexpr double kRoundingFloor = 1e-12;

struct ResidualReport {
  std::string operator_id;
  std::string convention;  // empty unless the operator has variants
  cplx eigenvalue;
  int applications = 1;
  std::vector<ResidualLevel> levels;
  std::vector<double> pairwise_orders;  // NaN where either residual is at the floor
  double order = std::numeric_limits<double>::quiet_NaN();
  bool at_rounding_floor = false;

  [[nodiscard]] double finest_residual() const { return levels.back().residual; }
  /// Non-increasing residuals, ignoring rounding noise below kRoundingFloor.
  [[nodiscard]] bool monotone() const {
    for (std::size_t i = 1; i < levels.size(); ++i)
      if (levels[i].residual > levels[i - 1].residual && levels[i].residual > kRoundingFloor) return false;
    return true;
  }
};

inline void estimate_orders(ResidualReport& rep) {
  rep.pairwise_orders.clear();
  double worst = std::numeric_limits<double>::infinity();
  bool any = false;
  for (std::size_t i = 1; i < rep.levels.size(); ++i) {
    const auto& a = rep.levels[i - 1];
    const auto& b = rep.levels[i];
    if (a.residual > kRoundingFloor && b.residual > kRoundingFloor) {
      const double p = std::log(a.residual / b.residual) / std::log(a.h / b.h);
      rep.pairwise_orders.push_back(p);
      worst = std::min(worst, p);
      any = true;
    } else {
      rep.pairwise_orders.push_back(std::numeric_limits<double>::quiet_NaN());
    }
  }
  rep.at_rounding_floor = !any;
  rep.order = any ? worst : std::numeric_limits<double>::quiet_NaN();
}

/// Applies op (`applications` times) to the state sampled on each grid of
/// `counts` over (0, r_outer) and records ||O^a psi - e psi|| / ||psi||.
template <ModeState S>
ResidualReport residual_report(const DiracOperator& op, const S& state, cplx eigenvalue, std::span<const int> counts,
                               double r_outer, SpacingRule rule = SpacingRule::uniform_offset, int applications = 1,
                               std::string convention = {}) {
  if (counts.size() < 2) throw std::invalid_argument("residual_report: need at least 2 grid resolutions");
  if (applications < 1) throw std::invalid_argument("residual_report: applications must be >= 1");
  ResidualReport rep;
  rep.operator_id = applications == 1 ? op.id : op.id + "^" + std::to_string(applications);
  rep.convention = std::move(convention);
  rep.eigenvalue = eigenvalue;
  rep.applications = applications;
  for (const int count : counts) {
    const auto grid = make_grid(r_outer, count, rule);
    const ModeField psi = sample(state, grid);
    ModeField out = psi;
    for (int a = 0; a < applications; ++a) out = apply(op, out);
    rep.levels.push_back({count, grid->spacing(), relative_residual(out, psi, eigenvalue)});
  }
  estimate_orders(rep);
  return rep;
}

/// ||A B psi - B A psi|| / ||psi||.
inline double commutator_residual(const DiracOperator& a, const DiracOperator& b, const ModeField& psi) {
  const ModeField ab = apply(a, apply(b, psi));
  const ModeField ba = apply(b, apply(a, psi));
  return norm(combine(ab, -1.0, ba)) / norm(psi);
}

// ---------------------------------------------------------------------------
// component-row form of the eigenvalue equation as usually transcribed
//
//   (E - m)/i psi1 + e^{-it}(d_r - (i/r) d_t) psi4 + d_z psi3 = 0
//   (E - m)/i psi2 + e^{-it}(d_r + (i/r) d_t) psi3 - d_z psi4 = 0
//   (E + m)/i psi3 + e^{-it}(d_r - (i/r) d_t) psi2 + d_z psi1 = 0
//   (E + m)/i psi4 + e^{-it}(d_r - (i/r) d_t) psi1 - d_z psi2 = 0
//
// Each row's defect is scaled by the sum of its term magnitudes. Used only
// as a fidelity report; the operators above are derived from alpha . p.

template <ModeState S>
std::array<double, 4> transcribed_row_defects(const S& state, double energy, double mass, const CylindricalPoint& p,
                                              const PointwiseConfig& cfg = {}) {
  cfg.validate();
  const cplx I(0, 1);
  const Spinor psi = evaluate_mode_state(state, p);
  const Spinor dr = detail::stencil_derivative(
      [&](double off) { return evaluate_mode_state(state, CylindricalPoint{p.r + off, p.theta, p.z}); }, cfg.step,
      p.r < 2.0 * cfg.step);
  auto dth = [&](int s) { return I * static_cast<double>(state.n() + kAzimuthalShift[s]) * psi[s]; };
  auto dz = [&](int s) { return I * state.k_z() * psi[s]; };
  const cplx ph = std::polar(1.0, -p.theta);
  auto minus_op = [&](int s) { return ph * (dr[s] - I / p.r * dth(s)); };
  auto plus_op = [&](int s) { return ph * (dr[s] + I / p.r * dth(s)); };
  const std::array<std::array<cplx, 3>, 4> rows{{
      {(energy - mass) / I * psi[0], minus_op(3), dz(2)},
      {(energy - mass) / I * psi[1], plus_op(2), -dz(3)},
      {(energy + mass) / I * psi[2], minus_op(1), dz(0)},
      {(energy + mass) / I * psi[3], minus_op(0), -dz(1)},
  }};
  std::array<double, 4> out{};
  for (int k = 0; k < 4; ++k) {
    const cplx sum = rows[k][0] + rows[k][1] + rows[k][2];
    const double scale = std::abs(rows[k][0]) + std::abs(rows[k][1]) + std::abs(rows[k][2]);
    out[k] = scale > 0 ? std::abs(sum) / scale : 0.0;
  }
  return out;
}

}  // namespace revb
