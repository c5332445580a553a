#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "revb/observables.hpp"
#include "revb/operators.hpp"

using namespace revb;

namespace {

BeamState state_for(int n, double kappa, double kz, Branch b = Branch::plus) {
  const QuantumNumbers qn{n, kappa, kz, b};
  return make_normalized_state(qn, {}, make_geometry(qn, 1.0));
}

// z-propagating plane wave written in the mode layout: spin up uses n = 0 and
// fills psi_1, psi_3; spin down uses n = -1 and fills psi_2, psi_4.
struct PlaneWave {
  int index;
  double kz;
  Spinor amp;
  [[nodiscard]] int n() const { return index; }
  [[nodiscard]] double k_z() const { return kz; }
  [[nodiscard]] Spinor radial(double) const { return amp; }
  [[nodiscard]] Spinor evaluate(const CylindricalPoint& p) const { return evaluate_mode_state(*this, p); }
};

PlaneWave plane_wave(double kz, bool spin_up, double mass = 1.0) {
  const double e = std::hypot(mass, kz);
  const double lower = kz / (e + mass);
  if (spin_up) return {0, kz, Spinor{1.0, 0.0, lower, 0.0}};
  return {-1, kz, Spinor{0.0, 1.0, 0.0, -lower}};
}

const std::vector<int> kLadder{1024, 2048, 4096};
const std::vector<int> kCoarse{64, 128, 256};

}  // namespace

TEST(Grid, OffsetNodesAndCoarseRejection) {
  const RadialGrid g(2.0, 64);
  EXPECT_DOUBLE_EQ(g.r_min(), g.spacing() / 2);
  EXPECT_GT(g.nodes().front(), 0.0);
  EXPECT_LT(g.nodes().back(), 2.0);
  EXPECT_THROW(RadialGrid(2.0, 31), std::invalid_argument);
  const RadialGrid c(2.0, 64, SpacingRule::chebyshev);
  EXPECT_GT(c.nodes().front(), 0.0);
}

TEST(Grid, DerivativeIsFourthOrder) {
  auto err = [](int count) {
    const RadialGrid g(3.0, count);
    std::vector<double> f(count);
    for (int i = 0; i < count; ++i) f[i] = std::sin(2.0 * g.nodes()[i]);
    const auto d = g.derivative<double>(f);
    double worst = 0;
    for (int i = 0; i < count; ++i) worst = std::max(worst, std::abs(d[i] - 2.0 * std::cos(2.0 * g.nodes()[i])));
    return worst;
  };
  const double order = std::log2(err(128) / err(256));
  EXPECT_GT(order, 3.5);
}

TEST(Hamiltonian, EigenResidualAndOrder) {
  for (auto b : {Branch::plus, Branch::minus}) {
    for (int n : {-3, 0, 1, 4}) {
      const BeamState st = state_for(n, 1.3, -0.8, b);
      const double r1 = st.geometry().r1;
      const auto fine = residual_report(ops::hamiltonian(1.0), st, st.kinematics().energy, kLadder, r1);
      EXPECT_LT(fine.finest_residual(), 1e-7) << n;
      EXPECT_TRUE(fine.monotone()) << n;
      const auto coarse = residual_report(ops::hamiltonian(1.0), st, st.kinematics().energy, kCoarse, r1);
      EXPECT_NEAR(coarse.order, 4.0, 0.5) << n;
    }
  }
}

TEST(Hamiltonian, NearPlaneWaveState) {
  const QuantumNumbers qn{0, 1e-3, 1.0, Branch::plus};
  const BeamState st = make_normalized_state(qn, {}, make_geometry(qn, 1.0));
  const auto grid = make_grid(st.geometry().r1, 4096);
  const ModeField f = sample(st, grid);
  EXPECT_LT(relative_residual(apply(ops::hamiltonian(1.0), f), f, st.kinematics().energy), 1e-7);
}

TEST(Hamiltonian, ChebyshevGridAgrees) {
  const BeamState st = state_for(2, 0.9, 0.3);
  const auto grid = make_grid(st.geometry().r1, 4096, SpacingRule::chebyshev);
  const ModeField f = sample(st, grid);
  EXPECT_LT(relative_residual(apply(ops::hamiltonian(1.0), f), f, st.kinematics().energy), 1e-7);
}

TEST(Hamiltonian, WrongEigenvalueIsDetected) {
  const BeamState st = state_for(1, 1.0, 2.0);
  const auto f = sample(st, make_grid(st.geometry().r1, 4096));
  EXPECT_GT(relative_residual(apply(ops::hamiltonian(1.0), f), f, st.kinematics().energy + 1e-3), 5e-4);
}

TEST(Hamiltonian, PolarEngineCrossCheck) {
  const BeamState st = state_for(1, 1.0, 2.0);
  const auto pf = sample_polar(st, make_grid(st.geometry().r1, 512), 128);
  EXPECT_LT(relative_residual(apply(ops::hamiltonian(1.0), pf), pf, st.kinematics().energy), 1e-5);
}

TEST(AngularMomentum, JzExactOnModes) {
  for (int n = -3; n <= 10; ++n) {
    const BeamState st = state_for(n, 2.0, 1.0, n % 2 ? Branch::minus : Branch::plus);
    const auto rep = residual_report(ops::total_angular_momentum_z(), st, n + 0.5, kLadder, st.geometry().r1);
    EXPECT_LT(rep.finest_residual(), 1e-12) << n;
    EXPECT_TRUE(rep.at_rounding_floor) << n;
  }
}

TEST(AngularMomentum, LzAloneIsNotAnEigenoperator) {
  const BeamState st = state_for(0, 1.0, 1.0);
  const auto f = sample(st, make_grid(st.geometry().r1, 2048));
  const auto lz = apply(ops::orbital_z(), f);
  EXPECT_GT(relative_residual(lz, f, best_fit_eigenvalue(lz, f)), 0.1);
}

TEST(Momentum, PzExact) {
  const BeamState st = state_for(3, 0.7, -2.5);
  const auto rep = residual_report(ops::momentum_z(), st, -2.5, kLadder, st.geometry().r1);
  EXPECT_LT(rep.finest_residual(), 1e-12);
}

TEST(KOperator, ConventionsAndEigenvalue) {
  EXPECT_TRUE(is_mode_preserving(ops::k_operator(KConvention::g0g3)));
  EXPECT_TRUE(is_mode_preserving(ops::k_operator(KConvention::g3g0)));
  EXPECT_FALSE(is_mode_preserving(ops::k_operator(KConvention::tilde)));
  for (auto b : {Branch::plus, Branch::minus}) {
    const BeamState st = state_for(2, 1.5, 0.5, b);
    const double eig = sign_of(b) * 1.5;
    const double r1 = st.geometry().r1;
    const auto good = residual_report(ops::k_operator(KConvention::g3g0), st, eig, kLadder, r1,
                                      SpacingRule::uniform_offset, 1, "g3g0");
    EXPECT_EQ(good.convention, "g3g0");
    EXPECT_LT(good.finest_residual(), 1e-7);
    // the other ordering carries the opposite sign
    const auto flipped = residual_report(ops::k_operator(KConvention::g0g3), st, -eig, kLadder, r1);
    EXPECT_LT(flipped.finest_residual(), 1e-7);
    const auto wrong = residual_report(ops::k_operator(KConvention::g0g3), st, eig, kLadder, r1);
    EXPECT_GT(wrong.finest_residual(), 1.0);
    const auto squared = residual_report(ops::k_operator(KConvention::g3g0), st, 1.5 * 1.5, kLadder, r1,
                                         SpacingRule::uniform_offset, 2);
    EXPECT_LT(squared.finest_residual(), 1e-6);
    const auto coarse = residual_report(ops::k_operator(KConvention::g3g0), st, eig, kCoarse, r1);
    EXPECT_GE(coarse.order, 3.5);
  }
}

TEST(KOperator, TildeFrameNeedsPolarEngine) {
  const BeamState st = state_for(1, 1.0, 2.0);
  const auto f = sample(st, make_grid(st.geometry().r1, 256));
  EXPECT_THROW(apply(ops::k_operator(KConvention::tilde), f), mode_structure_error);
  const auto pf = sample_polar(st, make_grid(st.geometry().r1, 256), 64);
  EXPECT_GT(relative_residual(apply(ops::k_operator(KConvention::tilde), pf), pf, 1.0), 0.1);
  EXPECT_EQ(parse_k_convention("tilde"), KConvention::tilde);
  EXPECT_THROW(parse_k_convention("g1g2"), std::invalid_argument);
}

TEST(Commutators, VanishOnEigenstatesAndSuperpositions) {
  const auto k = ops::k_operator(KConvention::g3g0);
  const auto h = ops::hamiltonian(1.0);
  const auto jz = ops::total_angular_momentum_z();
  const auto pz = ops::momentum_z();
  const BeamState a = state_for(1, 1.0, 2.0, Branch::plus);
  const QuantumNumbers qb{1, 0.6, 2.0, Branch::minus};
  const BeamState b = make_normalized_state(qb, {}, make_geometry(qb, 1.0));
  const auto grid = make_grid(a.geometry().r1, 4096);
  const ModeField fa = sample(a, grid);
  std::mt19937_64 g(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const ModeField mix = combine(fa, cplx(u(g), u(g)), sample(b, grid));
  for (const ModeField* f : {&fa, &mix}) {
    EXPECT_LT(commutator_residual(k, h, *f), 1e-6);
    EXPECT_LT(commutator_residual(jz, h, *f), 1e-6);
    EXPECT_LT(commutator_residual(k, jz, *f), 1e-6);
    EXPECT_LT(commutator_residual(pz, h, *f), 1e-6);
  }
}

TEST(Helicity, PlaneWaveControlIsEigenstate) {
  for (double kz : {0.5, 2.0, -3.0}) {
    for (bool up : {true, false}) {
      const PlaneWave pw = plane_wave(kz, up);
      const auto f = sample(pw, make_grid(1.0, 64));
      const double eig = up ? kz : -kz;
      EXPECT_LT(relative_residual(apply(ops::helicity(), f), f, eig), 1e-12);
      EXPECT_LT(relative_residual(apply(ops::hamiltonian(1.0), f), f, std::hypot(1.0, kz)), 1e-12);
    }
  }
}

TEST(Helicity, VortexStateIsNotAnEigenstate) {
  const BeamState st = state_for(0, 1.0, 1.0);
  const auto f = sample(st, make_grid(st.geometry().r1, 4096));
  const auto hf = apply(ops::helicity(), f);
  EXPECT_GT(relative_residual(hf, f, best_fit_eigenvalue(hf, f)), 0.01);
}

TEST(Pointwise, CylindricalMatchesCartesian) {
  const BeamState st = state_for(1, 1.0, 2.0);
  const double r1 = st.geometry().r1;
  std::mt19937_64 g(20240611);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const PointwiseConfig cfg{1e-3};
  double worst_h = 0, worst_s = 0, scale = 0;
  for (int i = 0; i < 1000; ++i) {
    const CylindricalPoint p{r1 * (0.02 + 0.96 * u(g)), 2.0 * std::numbers::pi * u(g), u(g) - 0.5};
    const Spinor a = apply_cylindrical_at(ops::hamiltonian(1.0), st, p, cfg);
    const Spinor b = apply_cartesian_at(ops::hamiltonian(1.0), st, p, cfg);
    const Spinor c = apply_cylindrical_at(ops::helicity(), st, p, cfg);
    const Spinor d = apply_cartesian_at(ops::helicity(), st, p, cfg);
    const Spinor psi = st.evaluate(p);
    for (int s = 0; s < 4; ++s) {
      worst_h = std::max(worst_h, std::abs(a[s] - b[s]));
      worst_s = std::max(worst_s, std::abs(c[s] - d[s]));
      scale = std::max(scale, std::abs(a[s]));
      // Cartesian application against the eigenvalue
      EXPECT_LT(std::abs(b[s] - st.kinematics().energy * psi[s]), 1e-6 * st.kinematics().energy);
    }
  }
  EXPECT_LT(worst_h / scale, 1e-6);
  EXPECT_LT(worst_s / scale, 1e-6);
}

TEST(Pointwise, AxisIntrusionAndNonCartesianOperators) {
  const BeamState st = state_for(1, 1.0, 2.0);
  EXPECT_THROW(apply_cartesian_at(ops::hamiltonian(1.0), st, {2e-3, 0.0, 0.0}, {1e-3}), axis_intrusion);
  EXPECT_THROW(apply_cylindrical_at(ops::hamiltonian(1.0), st, {0.0, 0.0, 0.0}), axis_intrusion);
  EXPECT_THROW(apply_cartesian_at(ops::total_angular_momentum_z(), st, {1.0, 0.0, 0.0}), std::invalid_argument);
  // near the axis the cylindrical engine switches to a forward stencil
  const CylindricalPoint p{1e-3, 0.3, 0.0};
  const Spinor v = apply_cylindrical_at(ops::hamiltonian(1.0), st, p, {1e-3});
  const Spinor psi = st.evaluate(p);
  for (int s = 0; s < 4; ++s) EXPECT_LT(std::abs(v[s] - st.kinematics().energy * psi[s]), 1e-6);
}

TEST(ComplexGradient, RecombinesOnPolynomialPhaseFields) {
  // f = w^m (x^2 + y^2)^q (1 + z^2) e^{i k z}, w = x + i s y with s = +-1
  const cplx I(0, 1);
  std::mt19937_64 g(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0;
  for (int m = 0; m <= 4; ++m) {
    for (int q = 0; q <= 2; ++q) {
      for (int s : {1, -1}) {
        const double k = 0.7;
        for (int i = 0; i < 50; ++i) {
          const double r = 0.1 + 2.0 * u(g);
          const double th = 2.0 * std::numbers::pi * u(g);
          const double z = 2.0 * u(g) - 1.0;
          const double x = r * std::cos(th);
          const double y = r * std::sin(th);
          const cplx gz = (1.0 + z * z) * std::polar(1.0, k * z);
          const cplx dgz = (2.0 * z + I * k * (1.0 + z * z)) * std::polar(1.0, k * z);
          const cplx w(x, s * y);
          const double rho = x * x + y * y;
          const cplx wm = std::pow(w, m);
          const cplx dwm = m == 0 ? cplx(0) : static_cast<double>(m) * std::pow(w, m - 1);
          const double rq = std::pow(rho, q);
          const double drq = q == 0 ? 0.0 : q * std::pow(rho, q - 1);
          const cplx fx = (dwm * rq + wm * drq * 2.0 * x) * gz;
          const cplx fy = (dwm * cplx(0, s) * rq + wm * drq * 2.0 * y) * gz;
          const cplx fz = wm * rq * dgz;
          // the same field in cylindrical form r^{m+2q} e^{i s m theta} g(z)
          const int p = m + 2 * q;
          const cplx ang = std::polar(1.0, s * m * th);
          const CylindricalPartials d{p * std::pow(r, p - 1) * ang * gz, I * static_cast<double>(s * m) * std::pow(r, p) * ang * gz,
                                      std::pow(r, p) * ang * dgz};
          const auto cart = recombine_cartesian(complex_gradient(d, r, th));
          const double scale = std::max({1.0, std::abs(fx), std::abs(fy), std::abs(fz)});
          worst = std::max({worst, std::abs(cart[0] - fx) / scale, std::abs(cart[1] - fy) / scale,
                            std::abs(cart[2] - fz) / scale});
        }
      }
    }
  }
  EXPECT_LT(worst, 1e-10);
  EXPECT_THROW(complex_gradient({}, 0.0, 0.0), axis_intrusion);
}

TEST(ComplexGradient, SphericalComponentsOfLinearFields) {
  // f = x + i y has nabla_{+1} = 0, nabla_{-1} = sqrt2
  const double r = 1.3, th = 0.4;
  const CylindricalPartials d{std::polar(1.0, th), cplx(0, 1) * r * std::polar(1.0, th), 0.0};
  const auto g = complex_gradient(d, r, th);
  EXPECT_NEAR(std::abs(g.plus), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(g.minus - std::numbers::sqrt2), 0.0, 1e-15);
}

TEST(Reports, OrdersAndFloor) {
  ResidualReport rep;
  rep.levels = {{64, 0.1, 1e-4}, {128, 0.05, 1e-4 / 16}, {256, 0.025, 1e-15}};
  estimate_orders(rep);
  EXPECT_NEAR(rep.pairwise_orders[0], 4.0, 1e-12);
  EXPECT_TRUE(std::isnan(rep.pairwise_orders[1]));
  EXPECT_NEAR(rep.order, 4.0, 1e-12);
  EXPECT_FALSE(rep.at_rounding_floor);
  const BeamState st = state_for(1, 1.0, 2.0);
  const std::vector<int> one{1024};
  EXPECT_THROW(residual_report(ops::hamiltonian(1.0), st, 1.0, one, 1.0), std::invalid_argument);
}

TEST(Fidelity, TranscribedComponentRows) {
  // rows 1 and 3 of the usual transcription hold; rows 2 and 4 do not
  const BeamState st = state_for(1, 1.0, 2.0);
  const auto rows =
      transcribed_row_defects(st, st.kinematics().energy, 1.0, {0.4 * st.geometry().r1, 0.7, 0.1}, {1e-3});
  EXPECT_LT(rows[0], 1e-8);
  EXPECT_LT(rows[2], 1e-8);
  EXPECT_GT(rows[1], 0.1);
  EXPECT_GT(rows[3], 0.1);
}

TEST(Fidelity, AlternativeBranchMinusLayoutIsNotAnEigenstate) {
  const QuantumNumbers qn{1, 1.0, 2.0, Branch::minus};
  const auto kin = derive_kinematics(qn);
  const auto geom = make_geometry(qn, 1.0);
  const auto alt = alternative_branch_minus_profile(qn, kin, 1.0);
  const auto f = sample(alt, make_grid(geom.r1, 1024));
  EXPECT_GT(relative_residual(apply(ops::hamiltonian(1.0), f), f, kin.energy), 0.1);
}
