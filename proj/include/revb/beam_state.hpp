#pragma once

// Bessel-spinor eigenstates of the free Dirac Hamiltonian in natural units
// (hbar = c = 1). Component s of a state carries the azimuthal phase
// exp(i (n + shift_s) theta) with shift = (0, 1, 0, 1), and every component
// shares the longitudinal phase exp(i k_z z).

#include <array>
#include <cmath>
#include <complex>
#include <concepts>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>

#include "dirac_matrices.hpp"
#include "numeric.hpp"
#include "special_functions.hpp"

namespace revb {

inline constexpr std::array<int, 4> kAzimuthalShift{0, 1, 0, 1};

/// Natural units, energies and momenta in multiples of the rest mass when
/// mass == 1.
struct Units {
  double mass = 1.0;

  void validate() const {
    if (!(mass > 0.0) || !std::isfinite(mass)) throw std::invalid_argument("Units: mass must be > 0");
  }
};

/// Sign of the eigenvalue of the auxiliary conserved operator.
enum class Branch : int { plus = 1, minus = -1 };

constexpr int sign_of(Branch b) { return static_cast<int>(b); }

inline std::string_view to_string(Branch b) { return b == Branch::plus ? "+" : "-"; }

inline Branch parse_branch(std::string_view s) {
  if (s == "+" || s == "plus" || s == "+1") return Branch::plus;
  if (s == "-" || s == "minus" || s == "-1") return Branch::minus;
  throw std::invalid_argument("unknown branch '" + std::string(s) + "' (expected + or -)");
}

struct QuantumNumbers {
  int n = 0;          // azimuthal index of the first component
  double kappa = 1;   // transverse momentum
  double k_z = 0;     // longitudinal momentum
  Branch branch = Branch::plus;

  void validate() const {
    if (!(kappa > 0.0) || !std::isfinite(kappa)) {
      throw std::invalid_argument("QuantumNumbers: kappa must be > 0 (kappa = 0 is the plane-wave limit)");
    }
    if (!std::isfinite(k_z)) throw std::invalid_argument("QuantumNumbers: k_z must be finite");
    if (n + 1 > kMaxBesselOrder || n < -kMaxBesselOrder) {
      throw std::invalid_argument("QuantumNumbers: |n| outside the supported Bessel order range");
    }
  }
};

struct DerivedKinematics {
  double energy = 0;
  double p_kappa = 0;
  double k_z = 0;
  double mass = 0;
  cplx lambda_param;  // psi_1 / psi_3
  cplx c_ratio;       // (k_z - i kappa) / (E + m)
  double gamma_inv = 0;

  /// E - m without cancellation.
  [[nodiscard]] double kinetic() const { return (p_kappa * p_kappa + k_z * k_z) / (energy + mass); }
};

inline DerivedKinematics derive_kinematics(const QuantumNumbers& qn, const Units& u = {}) {
  qn.validate();
  u.validate();
  DerivedKinematics k;
  k.mass = u.mass;
  k.p_kappa = qn.kappa;
  k.k_z = qn.k_z;
  k.energy = std::hypot(u.mass, qn.kappa, qn.k_z);
  if (!(k.energy > u.mass)) throw std::invalid_argument("derive_kinematics: E == m (kappa = k_z = 0)");
  const double e_minus_m = k.kinetic();
  const double s = sign_of(qn.branch);
  k.lambda_param = cplx(qn.k_z, s * qn.kappa) / e_minus_m;
  k.c_ratio = cplx(qn.k_z, -qn.kappa) / (k.energy + u.mass);
  k.gamma_inv = u.mass / k.energy;
  return k;
}

enum class CutoffRule { first_zero_jn, first_zero_jn1, explicit_radius };

inline std::string_view to_string(CutoffRule rule) {
  switch (rule) {
    case CutoffRule::first_zero_jn:
      return "jn";
    case CutoffRule::first_zero_jn1:
      return "jn1";
    default:
      return "radius";
  }
}

struct BeamGeometry {
  double length = 1;  // z in [-length/2, length/2]
  double r1 = 1;
  CutoffRule cutoff_rule = CutoffRule::first_zero_jn;
};

/// Builds the geometry; for the first-zero rules r1 = alpha / kappa with alpha
/// the first zero of J_|n| or J_|n+1|.
inline BeamGeometry make_geometry(const QuantumNumbers& qn, double length,
                                  CutoffRule rule = CutoffRule::first_zero_jn,
                                  double explicit_radius = 0.0) {
  qn.validate();
  if (!(length > 0.0)) throw std::invalid_argument("make_geometry: beam length must be > 0");
  BeamGeometry g;
  g.length = length;
  g.cutoff_rule = rule;
  switch (rule) {
    case CutoffRule::first_zero_jn:
      g.r1 = first_positive_zero(std::abs(qn.n)) / qn.kappa;
      break;
    case CutoffRule::first_zero_jn1:
      g.r1 = first_positive_zero(std::abs(qn.n + 1)) / qn.kappa;
      break;
    case CutoffRule::explicit_radius:
      if (!(explicit_radius > 0.0)) throw std::invalid_argument("make_geometry: explicit radius must be > 0");
      g.r1 = explicit_radius;
      break;
  }
  return g;
}

/// N = sqrt((E + m) / (4 pi E D I1)).
inline double normalization_constant(const DerivedKinematics& kin, const BeamGeometry& geom, double i1) {
  if (!(i1 > 0.0)) throw std::invalid_argument("normalization_constant: I1 must be > 0");
  return std::sqrt((kin.energy + kin.mass) / (4.0 * std::numbers::pi * kin.energy * geom.length * i1));
}

struct CylindricalPoint {
  double r = 0;
  double theta = 0;
  double z = 0;
};

struct SpinorSample {
  Spinor psi{};
  CylindricalPoint point;
};

/// Anything with a mode decomposition psi_s = R_s(r) e^{i(n+shift_s)theta} e^{i k_z z}.
template <typename S>
concept ModeState = requires(const S& s, double r) {
  { s.n() } -> std::convertible_to<int>;
  { s.k_z() } -> std::convertible_to<double>;
  { s.radial(r) } -> std::convertible_to<Spinor>;
};

template <ModeState S>
Spinor evaluate_mode_state(const S& state, const CylindricalPoint& p) {
  const Spinor rad = state.radial(p.r);
  Spinor out{};
  for (int s = 0; s < 4; ++s) {
    const double phase = (state.n() + kAzimuthalShift[s]) * p.theta + state.k_z() * p.z;
    out[s] = rad[s] * std::polar(1.0, phase);
  }
  return out;
}

/// Amplitudes multiplying (J_n, J_{n+1}, J_n, J_{n+1}) for a branch eigenstate.
/// Branch +: (1, 1, c, -c). Branch -: (1, -1, conj c, conj c).
inline std::array<cplx, 4> branch_amplitudes(Branch b, const DerivedKinematics& kin) {
  if (b == Branch::plus) return {1.0, 1.0, kin.c_ratio, -kin.c_ratio};
  const cplx cb = std::conj(kin.c_ratio);
  return {1.0, -1.0, cb, cb};
}

/// Amplitudes of the pre-constraint solution with a free lambda:
/// (1, -i/kappa (k_z - (E+m)/lambda), 1/lambda, -i/kappa (k_z/lambda - (E-m))).
inline std::array<cplx, 4> free_lambda_amplitudes(const DerivedKinematics& kin, cplx lambda) {
  if (lambda == cplx(0.0)) throw std::invalid_argument("free lambda must be nonzero");
  const cplx mi(0.0, -1.0 / kin.p_kappa);
  return {1.0, mi * (kin.k_z - (kin.energy + kin.mass) / lambda), 1.0 / lambda,
          mi * (kin.k_z / lambda - kin.kinetic())};
}

/// Radial profile shared by all the Bessel-spinor constructions.
class BesselSpinorProfile {
 public:
  BesselSpinorProfile(int n, double kappa, double k_z, std::array<cplx, 4> amplitudes)
      : n_(n), kappa_(kappa), k_z_(k_z), amp_(amplitudes) {}

  [[nodiscard]] int n() const { return n_; }
  [[nodiscard]] double k_z() const { return k_z_; }
  [[nodiscard]] double kappa() const { return kappa_; }
  [[nodiscard]] const std::array<cplx, 4>& amplitudes() const { return amp_; }

  [[nodiscard]] Spinor radial(double r) const {
    if (!(r >= 0.0)) throw std::domain_error("radial: r must be >= 0");
    const double jn = bessel_j(n_, kappa_ * r);
    const double jn1 = bessel_j(n_ + 1, kappa_ * r);
    return {amp_[0] * jn, amp_[1] * jn1, amp_[2] * jn, amp_[3] * jn1};
  }

  [[nodiscard]] Spinor evaluate(const CylindricalPoint& p) const { return evaluate_mode_state(*this, p); }

 private:
  int n_;
  double kappa_;
  double k_z_;
  std::array<cplx, 4> amp_;
};

/// A normalized eigenstate |n, kappa, k_z, branch>.
class BeamState {
 public:
  BeamState(const QuantumNumbers& qn, const DerivedKinematics& kin, const BeamGeometry& geom, double norm)
      : qn_(qn), kin_(kin), geom_(geom), norm_(norm), profile_(make_profile(qn, kin, norm)) {}

  [[nodiscard]] int n() const { return qn_.n; }
  [[nodiscard]] double k_z() const { return qn_.k_z; }
  [[nodiscard]] Spinor radial(double r) const { return profile_.radial(r); }
  [[nodiscard]] Spinor evaluate(const CylindricalPoint& p) const { return profile_.evaluate(p); }

  [[nodiscard]] const QuantumNumbers& quantum_numbers() const { return qn_; }
  [[nodiscard]] const DerivedKinematics& kinematics() const { return kin_; }
  [[nodiscard]] const BeamGeometry& geometry() const { return geom_; }
  [[nodiscard]] double normalization() const { return norm_; }

 private:
  static BesselSpinorProfile make_profile(const QuantumNumbers& qn, const DerivedKinematics& kin, double norm) {
    auto a = branch_amplitudes(qn.branch, kin);
    for (auto& v : a) v *= norm;
    return {qn.n, qn.kappa, qn.k_z, a};
  }

  QuantumNumbers qn_;
  DerivedKinematics kin_;
  BeamGeometry geom_;
  double norm_;
  BesselSpinorProfile profile_;
};

static_assert(ModeState<BeamState>);
static_assert(ModeState<BesselSpinorProfile>);

inline SpinorSample evaluate_spinor(const QuantumNumbers& qn, const DerivedKinematics& kin, double norm,
                                    const CylindricalPoint& p) {
  auto a = branch_amplitudes(qn.branch, kin);
  for (auto& v : a) v *= norm;
  return {BesselSpinorProfile(qn.n, qn.kappa, qn.k_z, a).evaluate(p), p};
}

/// The solution before lambda is fixed by the auxiliary operator; lambda_free
/// is arbitrary and nonzero, the first component is J_n e^{in theta} e^{i k_z z}.
inline SpinorSample evaluate_unnormalized_general(const QuantumNumbers& qn, const DerivedKinematics& kin,
                                                  cplx lambda_free, const CylindricalPoint& p) {
  return {BesselSpinorProfile(qn.n, qn.kappa, qn.k_z, free_lambda_amplitudes(kin, lambda_free)).evaluate(p), p};
}

/// N (c J_n, c J_{n+1} e^{i theta}, J_n, -J_{n+1} e^{i theta}): a branch-minus
/// layout that circulates in print. It is not an eigenstate of H and is only
/// used to report how far off it is.
inline BesselSpinorProfile alternative_branch_minus_profile(const QuantumNumbers& qn, const DerivedKinematics& kin,
                                                        double norm) {
  const cplx c = kin.c_ratio * norm;
  return {qn.n, qn.kappa, qn.k_z, {c, c, cplx(norm), cplx(-norm)}};
}

}  // namespace revb
