#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>
#include <unsupported/Eigen/MatrixFunctions>

#include "hrc/errors.hpp"
#include "hrc/integrator.hpp"
#include "hrc/riccati.hpp"
#include "hrc/transcription.hpp"
#include "hrc/verification.hpp"

using namespace hrc;

namespace {

Eigen::MatrixXd mat(std::initializer_list<std::initializer_list<double>> rows) {
  Eigen::MatrixXd m(rows.size(), rows.begin()->size());
  Eigen::Index i = 0;
  for (const auto& r : rows) {
    Eigen::Index j = 0;
    for (double v : r) m(i, j++) = v;
    ++i;
  }
  return m;
}

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(v.size());
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

LQProblem double_integrator() {
  return LQProblem::time_invariant(mat({{0, 1}, {0, 0}}), mat({{0}, {1}}),
                                   Eigen::MatrixXd::Zero(2, 2), Eigen::MatrixXd::Zero(2, 1),
                                   mat({{1}}), 0.0, 1.0, vec({0, 0}), vec({1, 0}));
}

LQProblem scalar_problem() {
  return LQProblem::time_invariant(mat({{0}}), mat({{1}}), mat({{0}}), mat({{0}}), mat({{1}}),
                                   0.0, 1.0, vec({0}), vec({1}));
}

}  // namespace

TEST(Integrator, ExponentialGrowthFourthOrder) {
  auto f = [](double, const Eigen::VectorXd& y) -> Eigen::VectorXd { return y; };
  double previous = 0.0;
  for (int n : {10, 20, 40, 80}) {
    Eigen::VectorXd y = vec({1.0});
    for (int k = 0; k < n; ++k) y = rk4_step(f, k * (1.0 / n), y, 1.0 / n);
    const double err = std::abs(y(0) - std::exp(1.0));
    if (previous > 0) EXPECT_GT(std::log2(previous / err), 3.8);
    previous = err;
  }
}

TEST(Integrator, BackwardStepInvertsForward) {
  auto f = [](double t, const Eigen::VectorXd& y) -> Eigen::VectorXd {
    return vec({-y(0) + std::sin(t)});
  };
  const Eigen::VectorXd y0 = vec({0.7});
  const Eigen::VectorXd y1 = rk4_step(f, 0.0, y0, 1e-3);
  EXPECT_NEAR(rk4_step(f, 1e-3, y1, -1e-3)(0), y0(0), 1e-14);
}

TEST(Integrator, NonFiniteThrows) {
  auto f = [](double, const Eigen::VectorXd& y) -> Eigen::VectorXd { return y * 1e308; };
  EXPECT_THROW(rk4_step(f, 0.0, vec({1e10}), 1.0), NumericalError);
}

TEST(LQProblem, ValidateRejectsBadWeights) {
  LQProblem p = double_integrator();
  p.r = [](double) { return Eigen::MatrixXd::Zero(1, 1); };
  EXPECT_THROW(p.validate(), DomainError);
  p = double_integrator();
  p.q = [](double) { return mat({{1, 2}, {0, 1}}); };
  EXPECT_THROW(p.validate(), DomainError);
  p = double_integrator();
  p.tf = 0.0;
  EXPECT_THROW(p.validate(), DomainError);
  EXPECT_NO_THROW(double_integrator().validate());
}

TEST(Riccati, GridIntervals) {
  EXPECT_EQ(grid_intervals(0.0, 10.0, 1e-3), 10000);
  EXPECT_THROW(grid_intervals(0.0, 1.0, 0.3), DomainError);
  EXPECT_THROW(grid_intervals(0.0, 1.0, -0.1), DomainError);
}

TEST(Riccati, ScalarAnalytic) {
  const RiccatiSolution sol = solve_riccati_backward(scalar_problem(), 1e-3);
  ASSERT_EQ(sol.intervals(), 1000);
  for (int k = 0; k <= sol.intervals(); ++k) {
    EXPECT_NEAR(sol.p(k)(0, 0), 1.0 - sol.time(k), 1e-12);
  }
  EXPECT_EQ(sol.p(1000)(0, 0), 0.0);
  EXPECT_EQ(sol.v(1000)(0), 1.0);
  EXPECT_EQ(sol.time(1000), 1.0);
}

TEST(Riccati, InterpolationAndHorizon) {
  const RiccatiSolution sol = solve_riccati_backward(scalar_problem(), 1e-2);
  EXPECT_NEAR(sol.p_at(0.505)(0, 0), 0.495, 1e-12);
  EXPECT_THROW(sol.p_at(1.5), DomainError);
  EXPECT_THROW(sol.v_at(-0.5), DomainError);
}

TEST(Riccati, DoubleIntegratorGramian) {
  // With Q = 0, S = 0 the equation is linear: P(t) = -int_t^tf e^{A(t-s)} B B' e^{A'(t-s)} ds
  // with a sign flip, i.e. [[T^3/3, -T^2/2], [-T^2/2, T]] for T = tf - t.
  const RiccatiSolution sol = solve_riccati_backward(double_integrator(), 1e-3);
  for (int k = 0; k <= sol.intervals(); k += 50) {
    const double tau = 1.0 - sol.time(k);
    const Eigen::MatrixXd expected =
        mat({{tau * tau * tau / 3, -tau * tau / 2}, {-tau * tau / 2, tau}});
    EXPECT_LT((sol.p(k) - expected).cwiseAbs().maxCoeff(), 1e-12) << sol.time(k);
  }
}

TEST(Riccati, RichardsonOracle) {
  // A Q-weighted problem has no closed form; compare against the same
  // equation integrated independently with a step 100 times smaller.
  const LQProblem p = LQProblem::time_invariant(
      mat({{0, 1}, {-1, -0.3}}), mat({{0}, {1}}), mat({{2, 0}, {0, 1}}),
      Eigen::MatrixXd::Zero(2, 1), mat({{0.5}}), 0.0, 1.0, vec({0, 0}), vec({1, 0}));
  const RiccatiSolution sol = solve_riccati_backward(p, 1e-2);
  Eigen::MatrixXd fine = Eigen::MatrixXd::Zero(2, 2);
  const double h = 1e-4;
  auto rhs = [&](double, const Eigen::MatrixXd& x) -> Eigen::MatrixXd {
    const Eigen::MatrixXd a = p.a(0), b = p.b(0), q = p.q(0), rinv = p.r(0).inverse();
    return a * x + x * a.transpose() + x * q * x - b * rinv * b.transpose();
  };
  for (int k = 0; k < 10000; ++k) fine = rk4_step(rhs, 1.0 - k * h, fine, -h);
  EXPECT_LT((sol.p(0) - fine).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(Riccati, VMatchesMatrixExponential) {
  const Eigen::MatrixXd a = mat({{0.1, 1.0, 0}, {-0.5, -0.2, 0.3}, {0, 0.4, -1}});
  const LQProblem p = LQProblem::time_invariant(
      a, mat({{0}, {1}, {0}}), Eigen::MatrixXd::Zero(3, 3), Eigen::MatrixXd::Zero(3, 1),
      mat({{1}}), 0.0, 2.0, vec({0, 0, 0}), vec({1, -0.5, 0.25}));
  const RiccatiSolution sol = solve_riccati_backward(p, 1e-3);
  const Eigen::MatrixXd expm = (-2.0 * a).exp();
  EXPECT_LT((sol.v(0) - expm * p.xf).norm(), 1e-6);
}

TEST(Riccati, SymmetryOnBaselineSizedProblem) {
  const LQProblem p = random_lq_problem(99, 6, 2, 3.0);
  const RiccatiSolution sol = solve_riccati_backward(p, 1e-3);
  for (int k = 0; k <= sol.intervals(); ++k) {
    EXPECT_LT((sol.p(k) - sol.p(k).transpose()).cwiseAbs().maxCoeff(), 1e-8);
  }
}

TEST(OptimalControl, DirectEvaluation) {
  // Scalar P = 2, V - X = 4, B = R = 1, S = 0 gives u = 2.
  const LQProblem p = scalar_problem();
  const RiccatiSolution sol(0.0, 1.0, {mat({{2}}), mat({{2}}), mat({{0}})},
                            {vec({5}), vec({5}), vec({1})}, 1);
  EXPECT_NEAR(optimal_control(p, sol, 0.25, vec({1}))(0), 2.0, 1e-14);
}

TEST(OptimalControl, ZeroResidualGivesZero) {
  const LQProblem p = double_integrator();
  const RiccatiSolution sol = solve_riccati_backward(p, 1e-2);
  EXPECT_LT(optimal_control(p, sol, 0.3, sol.v_at(0.3)).norm(), 1e-12);
}

TEST(Rollout, DoubleIntegratorClosedForm) {
  const LQProblem p = double_integrator();
  const RiccatiSolution sol = solve_riccati_backward(p, 1e-3);
  const OptimalTrajectory traj = rollout(p, sol, 1e-3);
  EXPECT_NEAR(traj.cost, 6.0, 0.06);
  EXPECT_EQ(traj.states.front(), p.x0);
  double sq = 0.0;
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    const double t = traj.times[k];
    const Eigen::Vector2d exact(3 * t * t - 2 * t * t * t, 6 * t - 6 * t * t);
    sq += (traj.states[k] - exact).squaredNorm();
    if (t <= 0.95) EXPECT_NEAR(traj.controls[k](0), 6 - 12 * t, 0.06) << t;
  }
  EXPECT_LT(std::sqrt(sq / traj.times.size()), 1e-2);
  EXPECT_LT((traj.states.back() - p.xf).norm(), 1e-3);
}

TEST(Rollout, OriginStaysAtOrigin) {
  LQProblem p = double_integrator();
  p.xf = vec({0, 0});
  p.q = [](double) { return Eigen::MatrixXd::Identity(2, 2); };
  const OptimalTrajectory traj = rollout(p, solve_riccati_backward(p, 1e-2), 1e-2);
  for (const auto& x : traj.states) EXPECT_LT(x.norm(), 1e-14);
  EXPECT_LT(std::abs(traj.cost), 1e-20);
}

TEST(Rollout, RefinedStepAndBadStep) {
  const LQProblem p = double_integrator();
  const RiccatiSolution sol = solve_riccati_backward(p, 1e-2);
  const OptimalTrajectory fine = rollout(p, sol, 5e-3);
  EXPECT_EQ(fine.times.size(), 201u);
  EXPECT_THROW(rollout(p, sol, 3e-3), DomainError);
}

TEST(Cost, ConstantIntegrand) {
  LQProblem p = double_integrator();
  OptimalTrajectory traj;
  for (int k = 0; k <= 10; ++k) {
    traj.times.push_back(0.1 * k);
    traj.states.push_back(vec({0, 0}));
    traj.controls.push_back(vec({3}));
  }
  EXPECT_NEAR(cost(p, traj), 0.5 * 9.0, 1e-14);
  traj.controls.assign(11, vec({0}));
  EXPECT_EQ(cost(p, traj), 0.0);
}

TEST(Transcription, DoubleIntegrator) {
  const TranscriptionResult r = transcription_oracle(double_integrator(), 200);
  EXPECT_NEAR(r.cost, 6.0, 0.06);
  EXPECT_EQ(r.states.front(), vec({0, 0}));
  EXPECT_LT((r.states.back() - vec({1, 0})).norm(), 1e-12);
  for (std::size_t k = 1; k + 1 < r.times.size(); ++k) {
    EXPECT_NEAR(r.controls[k](0), 6 - 12 * r.times[k], 1e-2);
  }
}

TEST(Transcription, EndpointControlsConvergeFirstOrder) {
  // Trapezoidal collocation only pins the end controls to O(h).
  auto end_error = [](int n) {
    const TranscriptionResult r = transcription_oracle(double_integrator(), n);
    return std::max(std::abs(r.controls.front()(0) - 6.0), std::abs(r.controls.back()(0) + 6.0));
  };
  const double e1 = end_error(100), e2 = end_error(200), e3 = end_error(400);
  EXPECT_NEAR(e1 / e2, 2.0, 0.1);
  EXPECT_NEAR(e2 / e3, 2.0, 0.1);
  EXPECT_LT(e3, 0.02);
}

TEST(Transcription, RejectsDegenerateInput) {
  EXPECT_THROW(transcription_oracle(double_integrator(), 1), DomainError);
  // No input authority: the boundary constraints cannot all be met.
  LQProblem p = double_integrator();
  p.b = [](double) { return Eigen::MatrixXd::Zero(2, 1); };
  EXPECT_THROW(transcription_oracle(p, 20), SingularityError);
}

TEST(Transcription, AgreesWithRolloutOnRandomProblems) {
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const LQProblem p = random_lq_problem(seed, 3, 2, 2.0);
    const double jr = rollout(p, solve_riccati_backward(p, 1e-3), 1e-3).cost;
    const double jt = transcription_oracle(p, 100).cost;
    EXPECT_NEAR(jr / jt, 1.0, 1e-2) << seed;
  }
}
