#include <algorithm>
#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "hrc/errors.hpp"
#include "hrc/interaction_model.hpp"

using namespace hrc;

namespace {

ImpedanceParams baseline_impedance() {
  Eigen::Matrix2d m, b, k;
  m << 5, 1, 1, -3;
  b << 20, 0, 5, 15;
  k << 1, 0.5, 0, 0;
  return {MatrixSchedule::constant(m), MatrixSchedule::constant(b), MatrixSchedule::constant(k)};
}

HumanParams baseline_human() {
  const Eigen::Matrix2d i = Eigen::Matrix2d::Identity();
  return {MatrixSchedule::constant(10 * i), MatrixSchedule::constant(2 * i),
          MatrixSchedule::constant(i)};
}

}  // namespace

TEST(MatrixSchedule, ConstantEvaluatesEverywhere) {
  const Eigen::Matrix2d m = Eigen::Matrix2d::Identity() * 3;
  const MatrixSchedule s = MatrixSchedule::constant(m);
  EXPECT_EQ(s.evaluate(-100.0), Eigen::MatrixXd(m));
  EXPECT_EQ(s.rows(), 2);
  EXPECT_EQ(s.cols(), 2);
}

TEST(MatrixSchedule, SinusoidalElementwise) {
  Eigen::MatrixXd base(1, 2), amp(1, 2);
  base << 1, 2;
  amp << 0.5, -1;
  const MatrixSchedule s = MatrixSchedule::sinusoidal(base, amp, 2.0);
  const Eigen::MatrixXd v = s.evaluate(0.3);
  EXPECT_NEAR(v(0, 0), 1 + 0.5 * std::sin(0.6), 1e-15);
  EXPECT_NEAR(v(0, 1), 2 - std::sin(0.6), 1e-15);
}

TEST(MatrixSchedule, TabulatedInterpolatesLinearly) {
  const MatrixSchedule s = MatrixSchedule::tabulated(
      {0.0, 1.0, 3.0}, {Eigen::MatrixXd::Constant(1, 1, 0.0), Eigen::MatrixXd::Constant(1, 1, 2.0),
                        Eigen::MatrixXd::Constant(1, 1, -2.0)});
  EXPECT_NEAR(s.evaluate(0.25)(0, 0), 0.5, 1e-15);
  EXPECT_NEAR(s.evaluate(2.0)(0, 0), 0.0, 1e-15);
  EXPECT_NEAR(s.evaluate(3.0)(0, 0), -2.0, 1e-15);
  EXPECT_THROW(s.evaluate(3.5), DomainError);
}

TEST(MatrixSchedule, TabulatedRejectsBadTables) {
  const Eigen::MatrixXd one = Eigen::MatrixXd::Ones(1, 1);
  EXPECT_THROW(MatrixSchedule::tabulated({0.0}, {one}), DomainError);
  EXPECT_THROW(MatrixSchedule::tabulated({0.0, 0.0}, {one, one}), DomainError);
  EXPECT_THROW(MatrixSchedule::tabulated({0.0, 1.0}, {one}), DomainError);
}

TEST(MatrixSchedule, HorizonIsEnforced) {
  MatrixSchedule s = MatrixSchedule::constant(Eigen::MatrixXd::Ones(2, 2));
  s.set_horizon(0.0, 10.0);
  EXPECT_NO_THROW(s.evaluate(10.0));
  EXPECT_NO_THROW(s.evaluate(10.0 + 1e-10));
  EXPECT_THROW(s.evaluate(10.1), DomainError);
  EXPECT_THROW(s.evaluate(-0.1), DomainError);
}

TEST(MatrixSchedule, ScaledAndEquality) {
  const MatrixSchedule s = MatrixSchedule::constant(Eigen::MatrixXd::Ones(2, 2));
  EXPECT_EQ(s.scaled(2.0).evaluate(0)(1, 1), 2.0);
  EXPECT_TRUE(s == MatrixSchedule::constant(Eigen::MatrixXd::Ones(2, 2)));
  EXPECT_FALSE(s == MatrixSchedule::constant(Eigen::MatrixXd::Ones(2, 3)));
  EXPECT_FALSE(s == s.scaled(2.0));
}

TEST(ImpedanceModel, BaselineMatrices) {
  const ImpedanceMatrices m = impedance_state_matrices(baseline_impedance(), 0.0);
  Eigen::Matrix2d mk, mb;
  mk << 0.1875, 0.09375, 0.0625, 0.03125;
  mb << 4.0625, 0.9375, -0.3125, -4.6875;
  EXPECT_LT((m.a.topLeftCorner<2, 2>()).norm(), 1e-15);
  EXPECT_EQ((m.a.topRightCorner<2, 2>()), Eigen::Matrix2d::Identity());
  EXPECT_LT((m.a.bottomLeftCorner<2, 2>() + mk).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_LT((m.a.bottomRightCorner<2, 2>() + mb).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_EQ(m.b.topRows<2>(), Eigen::Matrix2d::Zero());
  EXPECT_EQ(m.b.bottomRows<2>(), Eigen::Matrix2d::Identity());
}

TEST(ImpedanceModel, SingularMassThrows) {
  ImpedanceParams imp = baseline_impedance();
  imp.mass = MatrixSchedule::constant(Eigen::Matrix2d::Zero());
  EXPECT_THROW(impedance_state_matrices(imp, 0.0), SingularityError);
}

TEST(ImpedanceModel, ReproducesImpedanceEquation) {
  // xddot from the state matrices must satisfy M xddot + B xdot + K x = f.
  const ImpedanceParams imp = baseline_impedance();
  const ImpedanceMatrices m = impedance_state_matrices(imp, 0.0);
  const Eigen::Vector4d xi(0.3, -0.2, 0.5, 0.1);
  const Eigen::Vector2d u(1.0, -2.0);
  const Eigen::Vector4d dxi = m.a * xi + m.b * u;
  const Eigen::Vector2d lhs = imp.mass.evaluate(0) * dxi.tail<2>() +
                              imp.damping.evaluate(0) * xi.tail<2>() +
                              imp.stiffness.evaluate(0) * xi.head<2>();
  EXPECT_LT((lhs - imp.mass.evaluate(0) * u).norm(), 1e-13);
}

TEST(HumanModel, BaselineMatrices) {
  const HumanForceMatrices h = human_force_matrices(baseline_human(), 0.0);
  EXPECT_LT((h.a.leftCols<2>() - 0.1 * Eigen::Matrix2d::Identity()).norm(), 1e-15);
  EXPECT_EQ(h.a.rightCols<2>(), Eigen::Matrix2d::Zero());
  EXPECT_LT((h.b + 0.2 * Eigen::Matrix2d::Identity()).norm(), 1e-15);
}

TEST(HumanModel, SingularDampingThrows) {
  HumanParams human = baseline_human();
  human.damping = MatrixSchedule::constant(Eigen::Matrix2d::Zero());
  EXPECT_THROW(human_force_matrices(human, 0.0), SingularityError);
}

TEST(UnifiedModel, BaselineEigenvalues) {
  const UnifiedMatrices u = unified_matrices(baseline_impedance(), baseline_human(), 0.0);
  const Eigen::VectorXcd ev = u.a.eigenvalues();
  std::vector<double> re;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    EXPECT_NEAR(ev(i).imag(), 0.0, 1e-9);
    re.push_back(ev(i).real());
  }
  std::sort(re.begin(), re.end());
  // Roots of det(M s^2 + B s + K) together with the human pole -0.2 (twice).
  Eigen::Matrix2d m, b, k;
  m << 5, 1, 1, -3;
  b << 20, 0, 5, 15;
  k << 1, 0.5, 0, 0;
  auto det = [&](double s) { return (m * s * s + b * s + k).determinant(); };
  int impedance_roots = 0;
  int human_roots = 0;
  for (double r : re) {
    if (std::abs(r + 0.2) < 1e-9) {
      ++human_roots;
    } else {
      EXPECT_NEAR(det(r), 0.0, 1e-8) << r;
      ++impedance_roots;
    }
  }
  EXPECT_EQ(human_roots, 2);
  EXPECT_EQ(impedance_roots, 4);
  EXPECT_NEAR(re.back(), 4.648, 1e-3);  // indefinite M_imp: one unstable mode
}

TEST(UnifiedModel, BlockStructure) {
  const UnifiedMatrices u = unified_matrices(baseline_impedance(), baseline_human(), 0.0);
  EXPECT_EQ((u.a.topRightCorner<4, 2>()), (Eigen::Matrix<double, 4, 2>::Zero()));
  EXPECT_EQ(u.b.bottomRows<2>(), Eigen::Matrix2d::Zero());
  EXPECT_EQ(u.b.middleRows<2>(2), Eigen::Matrix2d::Identity());
}

TEST(UnifiedModel, TimeVaryingStiffness) {
  ImpedanceParams imp = baseline_impedance();
  Eigen::MatrixXd amp = Eigen::MatrixXd::Zero(2, 2);
  amp(0, 0) = 0.5;
  imp.stiffness = MatrixSchedule::sinusoidal(imp.stiffness.evaluate(0), amp, 1.0);
  const UnifiedMatrices a = unified_matrices(imp, baseline_human(), 0.0);
  const UnifiedMatrices b = unified_matrices(imp, baseline_human(), 1.0);
  EXPECT_GT((a.a - b.a).norm(), 1e-3);
}

TEST(InteractionValidation, DetectsSingularityInsideHorizon) {
  ImpedanceParams imp = baseline_impedance();
  // det M(t) = -3 (5 - 5t) - 1 crosses zero at t = 16/15, between samples.
  imp.mass = MatrixSchedule::tabulated(
      {0.0, 2.0}, {imp.mass.evaluate(0), (Eigen::MatrixXd(2, 2) << -5, 1, 1, -3).finished()});
  EXPECT_THROW(validate_interaction_models(imp, baseline_human(), 0.0, 2.0, 101), SingularityError);
  EXPECT_NO_THROW(validate_interaction_models(baseline_impedance(), baseline_human(), 0.0, 10.0));
}
