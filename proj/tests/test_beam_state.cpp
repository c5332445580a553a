#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "revb/beam_state.hpp"
#include "revb/observables.hpp"

using namespace revb;

namespace {

CylindricalPoint random_point(std::mt19937_64& g, double r_max, double length) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return {r_max * (0.01 + 0.98 * u(g)), 2.0 * std::numbers::pi * u(g), length * (u(g) - 0.5)};
}

}  // namespace

TEST(Kinematics, DispersionExample) {
  const auto k = derive_kinematics({1, 3.0, 4.0, Branch::plus});
  EXPECT_DOUBLE_EQ(k.energy, std::sqrt(26.0));
  EXPECT_NEAR(std::norm(k.c_ratio), (std::sqrt(26.0) - 1.0) / (std::sqrt(26.0) + 1.0), 1e-12);
  EXPECT_DOUBLE_EQ(k.gamma_inv, 1.0 / std::sqrt(26.0));
}

TEST(Kinematics, LambdaForBothBranches) {
  const auto plus = derive_kinematics({0, 1.0, 0.0, Branch::plus});
  EXPECT_NEAR(plus.lambda_param.real(), 0.0, 1e-15);
  EXPECT_NEAR(plus.lambda_param.imag(), 1.0 / (std::sqrt(2.0) - 1.0), 1e-12);

  const QuantumNumbers qn{2, 0.7, -1.3, Branch::minus};
  const auto minus = derive_kinematics(qn, Units{1.5});
  const double em = minus.energy - 1.5;
  EXPECT_NEAR(std::abs(minus.lambda_param - cplx(-1.3, -0.7) / em), 0.0, 1e-12 * std::abs(minus.lambda_param));
}

TEST(Kinematics, KineticEnergyWithoutCancellation) {
  const auto k = derive_kinematics({0, 1e-6, 0.0, Branch::plus});
  EXPECT_NEAR(k.kinetic(), 0.5e-12, 1e-24);
}

TEST(Kinematics, RejectsDegenerateInput) {
  EXPECT_THROW(derive_kinematics({0, 0.0, 1.0, Branch::plus}), std::invalid_argument);
  EXPECT_THROW(derive_kinematics({0, -1.0, 1.0, Branch::plus}), std::invalid_argument);
  EXPECT_THROW(derive_kinematics({0, 1.0, 1.0, Branch::plus}, Units{0.0}), std::invalid_argument);
  EXPECT_THROW(derive_kinematics({64, 1.0, 1.0, Branch::plus}), std::invalid_argument);
}

TEST(Geometry, CutoffRules) {
  const QuantumNumbers qn{2, 0.5, 1.0, Branch::plus};
  EXPECT_DOUBLE_EQ(make_geometry(qn, 1.0).r1, first_positive_zero(2) / 0.5);
  EXPECT_DOUBLE_EQ(make_geometry(qn, 1.0, CutoffRule::first_zero_jn1).r1, first_positive_zero(3) / 0.5);
  EXPECT_DOUBLE_EQ(make_geometry(qn, 1.0, CutoffRule::explicit_radius, 3.25).r1, 3.25);
  EXPECT_THROW(make_geometry(qn, 1.0, CutoffRule::explicit_radius, 0.0), std::invalid_argument);
  EXPECT_THROW(make_geometry(qn, -1.0), std::invalid_argument);
  // negative n uses |n|
  EXPECT_DOUBLE_EQ(make_geometry({-3, 1.0, 0.0, Branch::plus}, 1.0).r1, first_positive_zero(3));
}

TEST(Spinor, OriginValues) {
  const QuantumNumbers qn{0, 1.0, 1.0, Branch::plus};
  const auto kin = derive_kinematics(qn);
  const auto s = evaluate_spinor(qn, kin, 1.0, {0.0, 0.0, 0.0});
  EXPECT_EQ(s.psi[0], cplx(1.0));
  EXPECT_EQ(s.psi[1], cplx(0.0));
  EXPECT_EQ(s.psi[2], kin.c_ratio);
  EXPECT_EQ(s.psi[3], cplx(0.0));

  const QuantumNumbers q2{2, 1.0, 1.0, Branch::minus};
  const auto s2 = evaluate_spinor(q2, derive_kinematics(q2), 3.0, {0.0, 1.0, 2.0});
  for (const auto& v : s2.psi) EXPECT_EQ(v, cplx(0.0));
}

TEST(Spinor, PeriodicInTheta) {
  const QuantumNumbers qn{3, 1.2, -0.4, Branch::plus};
  const auto kin = derive_kinematics(qn);
  const auto a = evaluate_spinor(qn, kin, 1.0, {0.8, 0.3, 0.2});
  const auto b = evaluate_spinor(qn, kin, 1.0, {0.8, 0.3 + 2.0 * std::numbers::pi, 0.2});
  for (int s = 0; s < 4; ++s) EXPECT_NEAR(std::abs(a.psi[s] - b.psi[s]), 0.0, 1e-14);
}

TEST(Spinor, ExplicitComponentLayout) {
  const QuantumNumbers qn{1, 0.9, 0.6, Branch::plus};
  const auto kin = derive_kinematics(qn);
  const CylindricalPoint p{1.7, 0.4, -0.3};
  const double norm = 0.37;
  const auto s = evaluate_spinor(qn, kin, norm, p);
  const double jn = oracle::bessel_j(1, 0.9 * p.r);
  const double jn1 = oracle::bessel_j(2, 0.9 * p.r);
  const cplx ph = std::polar(1.0, 1 * p.theta + 0.6 * p.z);
  const cplx eith = std::polar(1.0, p.theta);
  const cplx c = cplx(0.6, -0.9) / (kin.energy + 1.0);
  const Spinor want{norm * ph * jn, norm * ph * jn1 * eith, norm * ph * c * jn, -norm * ph * c * jn1 * eith};
  for (int k = 0; k < 4; ++k) EXPECT_NEAR(std::abs(s.psi[k] - want[k]), 0.0, 1e-14);

  // branch - puts conj(c) on the lower pair and flips psi_2
  const QuantumNumbers qm{1, 0.9, 0.6, Branch::minus};
  const auto sm = evaluate_spinor(qm, derive_kinematics(qm), norm, p);
  const Spinor want_m{norm * ph * jn, -norm * ph * jn1 * eith, norm * ph * std::conj(c) * jn,
                      norm * ph * std::conj(c) * jn1 * eith};
  for (int k = 0; k < 4; ++k) EXPECT_NEAR(std::abs(sm.psi[k] - want_m[k]), 0.0, 1e-14);
}

TEST(Spinor, ConstantComponentRatios) {
  std::mt19937_64 g(7);
  for (auto b : {Branch::plus, Branch::minus}) {
    const QuantumNumbers qn{1, 1.1, 0.5, b};
    const auto kin = derive_kinematics(qn);
    const auto ref = branch_amplitudes(b, kin);
    for (int i = 0; i < 100; ++i) {
      const auto p = random_point(g, 3.0, 1.0);
      const auto s = evaluate_spinor(qn, kin, 1.0, p);
      const double jn = bessel_j(1, 1.1 * p.r);
      const double jn1 = bessel_j(2, 1.1 * p.r);
      EXPECT_NEAR(std::abs(s.psi[2] / s.psi[0] - ref[2]), 0.0, 1e-13);
      EXPECT_NEAR(std::abs(s.psi[3] / s.psi[1] - ref[3] / ref[1]), 0.0, 1e-13);
      if (std::abs(jn) > 1e-3) { EXPECT_NEAR(std::abs(s.psi[1] / s.psi[0]), std::abs(jn1 / jn), 1e-12); }
    }
  }
}

TEST(Spinor, FreeLambdaProportionalAtBranchValue) {
  std::mt19937_64 g(11);
  for (auto b : {Branch::plus, Branch::minus}) {
    const QuantumNumbers qn{2, 1.4, -0.8, b};
    const auto kin = derive_kinematics(qn);
    cplx first_ratio = 0;
    double worst = 0;
    for (int i = 0; i < 100; ++i) {
      const auto p = random_point(g, 3.0, 2.0);
      const auto gen = evaluate_unnormalized_general(qn, kin, kin.lambda_param, p);
      const auto eig = evaluate_spinor(qn, kin, 1.0, p);
      EXPECT_NEAR(std::abs(gen.psi[2] - gen.psi[0] / kin.lambda_param), 0.0, 1e-14);
      for (int s = 0; s < 4; ++s) {
        if (std::abs(eig.psi[s]) < 1e-6) continue;
        const cplx ratio = gen.psi[s] / eig.psi[s];
        if (first_ratio == cplx(0)) first_ratio = ratio;
        worst = std::max(worst, std::abs(ratio - first_ratio));
      }
    }
    EXPECT_LT(worst, 1e-10) << to_string(b);
  }
}

TEST(Spinor, FreeLambdaStructure) {
  const QuantumNumbers qn{1, 1.0, 1.0, Branch::plus};
  const auto kin = derive_kinematics(qn);
  const cplx lam(0.3, -2.0);
  const auto s = evaluate_unnormalized_general(qn, kin, lam, {0.9, 0.2, 0.1});
  EXPECT_NEAR(std::abs(s.psi[2] - s.psi[0] / lam), 0.0, 1e-15);
  const auto origin = evaluate_unnormalized_general(qn, kin, lam, {0.0, 0.2, 0.1});
  for (const auto& v : origin.psi) EXPECT_EQ(v, cplx(0.0));
  EXPECT_THROW(evaluate_unnormalized_general(qn, kin, 0.0, {1.0, 0.0, 0.0}), std::invalid_argument);
}

TEST(Spinor, BranchSwapMovesTheRatio) {
  const QuantumNumbers qp{0, 1.0, 2.0, Branch::plus};
  const QuantumNumbers qm{0, 1.0, 2.0, Branch::minus};
  const auto kp = derive_kinematics(qp);
  const auto km = derive_kinematics(qm);
  const CylindricalPoint p{1.0, 0.5, 0.0};
  const auto a = evaluate_spinor(qp, kp, 1.0, p);
  const auto b = evaluate_spinor(qm, km, 1.0, p);
  EXPECT_NEAR(std::abs(a.psi[2] - kp.c_ratio * a.psi[0]), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(b.psi[2] - std::conj(km.c_ratio) * b.psi[0]), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(a.psi[1] + b.psi[1]), 0.0, 1e-15);
}

TEST(Spinor, RejectsNegativeRadius) {
  const QuantumNumbers qn{0, 1.0, 0.0, Branch::plus};
  EXPECT_THROW(evaluate_spinor(qn, derive_kinematics(qn), 1.0, {-0.1, 0.0, 0.0}), std::domain_error);
}

TEST(Normalization, ClosedProductIsOne) {
  const QuantumNumbers qn{0, 1.0, 0.0, Branch::plus};
  const auto kin = derive_kinematics(qn);
  const auto geom = make_geometry(qn, 10.0);
  const double i1 = compute_i1(qn, geom);
  const double n = normalization_constant(kin, geom, i1);
  EXPECT_NEAR(n * n * (1.0 + std::norm(kin.c_ratio)) * 2.0 * std::numbers::pi * geom.length * i1, 1.0, 1e-14);

  // N from an independent Riemann I1 (frozen below) agrees to 1e-10 relative
  const double i1_riemann = 1.5586502983970998;
  const double n_ref = std::sqrt((kin.energy + 1.0) / (4.0 * std::numbers::pi * kin.energy * 10.0 * i1_riemann));
  EXPECT_NEAR(n, n_ref, 1e-10 * n_ref);
}

TEST(Normalization, DoublingLengthHalvesNormSquared) {
  const QuantumNumbers qn{2, 0.8, 1.0, Branch::minus};
  const auto kin = derive_kinematics(qn);
  const auto g1 = make_geometry(qn, 1.5);
  const auto g2 = make_geometry(qn, 3.0);
  const double i1 = compute_i1(qn, g1);
  const double a = normalization_constant(kin, g1, i1);
  const double b = normalization_constant(kin, g2, i1);
  EXPECT_NEAR(b * b, 0.5 * a * a, 1e-15 * a * a);
  EXPECT_THROW(normalization_constant(kin, g1, 0.0), std::invalid_argument);
}

TEST(Normalization, RandomStatesHaveUnitNormBy3DQuadrature) {
  std::mt19937_64 g(20240611);
  std::uniform_int_distribution<int> nd(-3, 10);
  std::uniform_real_distribution<double> kd(0.3, 5.0);
  std::uniform_real_distribution<double> zd(-5.0, 5.0);
  std::uniform_real_distribution<double> ld(0.5, 4.0);
  for (int i = 0; i < 10; ++i) {
    const QuantumNumbers qn{nd(g), kd(g), zd(g), i % 2 ? Branch::minus : Branch::plus};
    const auto geom = make_geometry(qn, ld(g));
    const BeamState st = make_normalized_state(qn, {}, geom);
    EXPECT_NEAR(norm_3d(st, geom), 1.0, 1e-8) << "n=" << qn.n << " kappa=" << qn.kappa;
  }
}
