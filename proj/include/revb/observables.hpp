#pragma once

// Scalar observables of a Bessel-spinor beam: I1, the spin-orbit weight
// Delta_n, <L_z>, <S_z> and the complex helicity expectation. Closed forms
// come from radial quadrature of J_n^2 and J_{n+1}^2; the grid oracles
// integrate psi^dagger (O psi) with O applied by finite differences.

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

#include "beam_state.hpp"
#include "operators.hpp"
#include "quadrature.hpp"
#include "special_functions.hpp"

namespace revb {

/// I1 = int_0^r1 (J_n^2 + J_{n+1}^2)(kappa r) r dr, integrated in x = kappa r
/// so that abs_tol stays meaningful for small kappa.
inline CertifiedIntegral compute_i1_certified(const QuantumNumbers& qn, const BeamGeometry& geom,
                                              const QuadratureConfig& cfg = {}) {
  qn.validate();
  CertifiedIntegral out = integrate_certified(
      [&](double x) {
        const double a = bessel_j(qn.n, x);
        const double b = bessel_j(qn.n + 1, x);
        return (a * a + b * b) * x;
      },
      0.0, qn.kappa * geom.r1, cfg);
  const double s = 1.0 / (qn.kappa * qn.kappa);
  out.value *= s;
  out.gauss *= s;
  out.simpson *= s;
  out.discrepancy *= s;
  return out;
}

inline double compute_i1(const QuantumNumbers& qn, const BeamGeometry& geom, const QuadratureConfig& cfg = {}) {
  return compute_i1_certified(qn, geom, cfg).value;
}

/// int_0^r1 J_{n+1}^2(kappa r) r dr.
inline double compute_upper_weight(const QuantumNumbers& qn, const BeamGeometry& geom,
                                   const QuadratureConfig& cfg = {}) {
  return integrate_certified(
             [&](double x) {
               const double b = bessel_j(qn.n + 1, x);
               return b * b * x;
             },
             0.0, qn.kappa * geom.r1, cfg)
             .value /
         (qn.kappa * qn.kappa);
}

/// Delta_n = (1/I1) int_0^r1 J_{n+1}^2 r dr.
inline double compute_delta_n(const QuantumNumbers& qn, const BeamGeometry& geom, const QuadratureConfig& cfg = {}) {
  const double i1 = compute_i1(qn, geom, cfg);
  if (!(i1 > 0.0)) throw numerical_error("compute_delta_n: I1 is not positive");
  return compute_upper_weight(qn, geom, cfg) / i1;
}

struct AngularExpectations {
  double lz = 0;
  double sz = 0;
};

/// (<L_z>, <S_z>) = (n + Delta_n, 1/2 - Delta_n).
inline AngularExpectations compute_angular_expectations(const QuantumNumbers& qn, const BeamGeometry& geom,
                                                        const QuadratureConfig& cfg = {}) {
  const double d = compute_delta_n(qn, geom, cfg);
  return {qn.n + d, 0.5 - d};
}

/// A normalised eigenstate with N fixed by I1 for the given geometry.
inline BeamState make_normalized_state(const QuantumNumbers& qn, const Units& units, const BeamGeometry& geom,
                                       const QuadratureConfig& cfg = {}) {
  const DerivedKinematics kin = derive_kinematics(qn, units);
  const double i1 = compute_i1(qn, geom, cfg);
  return {qn, kin, geom, normalization_constant(kin, geom, i1)};
}

struct SandwichConfig {
  QuadratureConfig quadrature{QuadratureRule::gauss_legendre_composite, 1e-11, 1 << 16};
  PointwiseConfig pointwise{1e-3};
};

/// <psi|O|psi> over the cylinder r < r1, |z| < D/2, with O applied pointwise
/// by cylindrical finite differences. O must be mode preserving, so the
/// integrand does not depend on theta or z.
template <ModeState S>
cplx sandwich(const DiracOperator& op, const S& state, const BeamGeometry& geom, const SandwichConfig& cfg = {}) {
  if (!is_mode_preserving(op)) throw mode_structure_error("sandwich: operator " + op.id + " is not mode preserving");
  const cplx radial = integrate(
      [&](double r) {
        const CylindricalPoint p{r, 0.0, 0.0};
        const Spinor psi = evaluate_mode_state(state, p);
        const Spinor out = apply_cylindrical_at(op, state, p, cfg.pointwise);
        cplx acc = 0;
        for (int s = 0; s < 4; ++s) acc += std::conj(psi[s]) * out[s];
        return acc * r;
      },
      0.0, geom.r1, cfg.quadrature);
  return 2.0 * std::numbers::pi * geom.length * radial;
}

/// int |psi|^2 dV by quadrature in all three coordinates: adaptive
/// Gauss-Legendre in r, trapezoid in theta (periodic) and midpoint in z.
template <ModeState S>
double norm_3d(const S& state, const BeamGeometry& geom, const QuadratureConfig& cfg = {}, int angles = 8,
               int slices = 4) {
  const double dtheta = 2.0 * std::numbers::pi / angles;
  const double dz = geom.length / slices;
  const CertifiedIntegral radial = integrate_certified(
      [&](double r) {
        numeric::CompensatedSum<double> acc;
        for (int j = 0; j < angles; ++j) {
          for (int k = 0; k < slices; ++k) {
            const CylindricalPoint p{r, j * dtheta, -0.5 * geom.length + (k + 0.5) * dz};
            const Spinor psi = evaluate_mode_state(state, p);
            double d = 0;
            for (const auto& v : psi) d += std::norm(v);
            acc.add(d);
          }
        }
        return acc.value() * dtheta * dz * r;
      },
      0.0, geom.r1, cfg);
  return radial.value;
}

struct HelicityExpectation {
  cplx closed_form;    // (k_z - i (m/E) kappa) (1/I1) int (J_n^2 - J_{n+1}^2) r dr
  cplx grid_sandwich;  // <psi| Sigma.p |psi> by grid integration
  cplx longitudinal;   // <psi| Sigma_z p_z |psi> by grid integration
  double difference = 0;  // |closed_form - grid_sandwich|
};

inline cplx helicity_closed_form(const QuantumNumbers& qn, const DerivedKinematics& kin, const BeamGeometry& geom,
                                 const QuadratureConfig& cfg = {}) {
  const double i1 = compute_i1(qn, geom, cfg);
  const double upper = compute_upper_weight(qn, geom, cfg);
  const double radial = (i1 - 2.0 * upper) / i1;
  return cplx(kin.k_z, -kin.gamma_inv * kin.p_kappa) * radial;
}

inline HelicityExpectation compute_helicity_expectation(const BeamState& state, const QuadratureConfig& cfg = {},
                                                        const SandwichConfig& scfg = {}) {
  HelicityExpectation h;
  h.closed_form = helicity_closed_form(state.quantum_numbers(), state.kinematics(), state.geometry(), cfg);
  h.grid_sandwich = sandwich(ops::helicity(), state, state.geometry(), scfg);
  h.longitudinal = sandwich(ops::longitudinal_helicity(), state, state.geometry(), scfg);
  h.difference = std::abs(h.closed_form - h.grid_sandwich);
  return h;
}

struct ObservableReport {
  QuantumNumbers qn;
  double mass = 1;
  double energy = 0;
  BeamGeometry geometry;
  double i1 = 0;
  double delta_n = 0;
  double exp_lz = 0;
  double exp_sz = 0;
  HelicityExpectation helicity;
  double norm_check = 0;
  double grid_lz = 0;  // <psi| -i d_theta |psi>
  double grid_sz = 0;  // <psi| Sigma_z / 2 |psi>
};

struct ObservableConfig {
  Units units;
  double length = 1.0;
  CutoffRule cutoff = CutoffRule::first_zero_jn;
  double explicit_radius = 0.0;
  QuadratureConfig quadrature;
  SandwichConfig sandwich;
};

inline ObservableReport make_observable_report(const QuantumNumbers& qn, const ObservableConfig& cfg) {
  ObservableReport rep;
  rep.qn = qn;
  rep.mass = cfg.units.mass;
  rep.geometry = make_geometry(qn, cfg.length, cfg.cutoff, cfg.explicit_radius);
  const BeamState state = make_normalized_state(qn, cfg.units, rep.geometry, cfg.quadrature);
  rep.energy = state.kinematics().energy;
  rep.i1 = compute_i1(qn, rep.geometry, cfg.quadrature);
  rep.delta_n = compute_upper_weight(qn, rep.geometry, cfg.quadrature) / rep.i1;
  rep.exp_lz = qn.n + rep.delta_n;
  rep.exp_sz = 0.5 - rep.delta_n;
  rep.helicity = compute_helicity_expectation(state, cfg.quadrature, cfg.sandwich);
  rep.norm_check = norm_3d(state, rep.geometry, cfg.quadrature);
  rep.grid_lz = sandwich(ops::orbital_z(), state, rep.geometry, cfg.sandwich).real();
  rep.grid_sz = sandwich(ops::spin_z(), state, rep.geometry, cfg.sandwich).real();
  return rep;
}

}  // namespace revb
