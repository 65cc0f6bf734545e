#include <cmath>
#include <numbers>
#include <string>

#include <gtest/gtest.h>

#include "hrc/errors.hpp"
#include "hrc/manipulator.hpp"
#include "hrc/simulation.hpp"

using namespace hrc;

namespace {

CartesianReference line_reference(const Eigen::Vector2d& from, const Eigen::Vector2d& to,
                                  int intervals, double duration) {
  CartesianReference ref;
  for (int k = 0; k <= intervals; ++k) {
    const double s = static_cast<double>(k) / intervals;
    ref.times.push_back(duration * s);
    ref.position.push_back(from + s * (to - from));
    ref.velocity.push_back((to - from) / duration);
    ref.force.push_back(Eigen::Vector2d::Zero());
  }
  return ref;
}

ScenarioConfig short_scenario() {
  ScenarioConfig c = ScenarioConfig::baseline_scenario();
  c.tf = 2.0;
  c.optimize_step = 2e-3;
  c.tracking.step = 1e-3;
  c.tracking.settle_time = 0.5;
  c.tracking.final_window = 0.5;
  c.bind_horizon();
  return c;
}

}  // namespace

TEST(Scenario, BaselineScenarioValues) {
  ScenarioConfig c = ScenarioConfig::baseline_scenario();
  EXPECT_NO_THROW(c.validate());
  EXPECT_EQ(c.arm, ManipulatorParams{});
  EXPECT_EQ(c.initial.stacked(), (Vector6d() << -0.5, 1, 0, 0, 0, 0).finished());
  EXPECT_EQ(c.target.stacked(), (Vector6d() << 0.8, -0.6, 0, 0, 0, 0).finished());
  EXPECT_EQ(c.gains.gamma.rows(), 20);
  EXPECT_EQ(c.rbf.nodes, 20);
}

TEST(Scenario, ValidationNamesKeys) {
  auto key_of = [](ScenarioConfig c) -> std::string {
    try {
      c.validate();
    } catch (const ConfigError& e) {
      return e.key();
    }
    return "";
  };
  ScenarioConfig c = ScenarioConfig::baseline_scenario();
  c.cost.r = MatrixSchedule::constant(Eigen::MatrixXd::Zero(2, 2));
  EXPECT_EQ(key_of(c), "cost.R");
  c = ScenarioConfig::baseline_scenario();
  c.optimize_step = 3e-3;
  EXPECT_EQ(key_of(c), "integrator.optimize_step");
  c = ScenarioConfig::baseline_scenario();
  c.tracking.step = 3e-4;
  EXPECT_EQ(key_of(c), "integrator.track_step");
  c = ScenarioConfig::baseline_scenario();
  c.impedance.mass = MatrixSchedule::constant(Eigen::MatrixXd::Zero(2, 2));
  EXPECT_EQ(key_of(c), "impedance.mass");
  c = ScenarioConfig::baseline_scenario();
  c.gains.gamma = Eigen::MatrixXd::Identity(3, 3);
  EXPECT_EQ(key_of(c), "controller.gamma");
  c = ScenarioConfig::baseline_scenario();
  c.cost.q = MatrixSchedule::constant(-Eigen::MatrixXd::Identity(6, 6));
  EXPECT_EQ(key_of(c), "cost.Q");
  c = ScenarioConfig::baseline_scenario();
  c.tf = -1;
  EXPECT_EQ(key_of(c), "horizon.tf");
}

TEST(Simulation, BuildProblemUsesUnifiedModel) {
  const ScenarioConfig c = ScenarioConfig::baseline_scenario();
  const LQProblem p = build_problem(c);
  const UnifiedMatrices u = unified_matrices(c.impedance, c.human, 1.0);
  EXPECT_EQ(p.a(1.0), Eigen::MatrixXd(u.a));
  EXPECT_EQ(p.b(1.0), Eigen::MatrixXd(u.b));
  EXPECT_EQ(p.x0, Eigen::VectorXd(c.initial.stacked()));
  EXPECT_EQ(p.xf, Eigen::VectorXd(c.target.stacked()));
  EXPECT_NO_THROW(p.validate());
}

TEST(Simulation, Phase1ReachesTarget) {
  const ScenarioConfig c = short_scenario();
  const Phase1Result r = phase1_optimize(c);
  ASSERT_EQ(r.cartesian.times.size(), 1001u);
  EXPECT_EQ(r.cartesian.position.front(), Eigen::Vector2d(-0.5, 1.0));
  EXPECT_LT((r.optimal.states.back() - Eigen::VectorXd(c.target.stacked())).norm(), 1e-3);
}

TEST(Simulation, JointReferenceReproducesPath) {
  ScenarioConfig c = ScenarioConfig::baseline_scenario();
  const CartesianReference cart =
      line_reference(Eigen::Vector2d(-0.5, 1.0), Eigen::Vector2d(0.8, -0.6), 100, 1.0);
  const ReferenceTrajectory ref = cartesian_to_joint_reference(c, cart);
  for (std::size_t k = 0; k < cart.times.size(); ++k) {
    EXPECT_LT((forward_kinematics(c.arm, ref.q[k]) - cart.position[k]).norm(), 1e-9);
    EXPECT_LT((jacobian(c.arm, ref.q[k]) * ref.qdot[k] - cart.velocity[k]).norm(), 1e-9);
    EXPECT_LE(ref.q[k](1), 0.0);
  }
}

TEST(Simulation, JointReferenceIsContinuousAcrossAngleCut) {
  // Sweeping through the -x axis makes atan2 jump by 2 pi.
  ScenarioConfig c = ScenarioConfig::baseline_scenario();
  const CartesianReference cart =
      line_reference(Eigen::Vector2d(-1.0, 0.5), Eigen::Vector2d(-1.0, -0.5), 200, 1.0);
  const ReferenceTrajectory ref = cartesian_to_joint_reference(c, cart);
  for (std::size_t k = 1; k < ref.q.size(); ++k) {
    EXPECT_LT((ref.q[k] - ref.q[k - 1]).norm(), 0.1);
  }
}

TEST(Simulation, JointReferenceUnreachableNamesTime) {
  ScenarioConfig c = ScenarioConfig::baseline_scenario();
  const CartesianReference cart =
      line_reference(Eigen::Vector2d(1.0, 0.0), Eigen::Vector2d(3.0, 0.0), 10, 1.0);
  try {
    cartesian_to_joint_reference(c, cart);
    FAIL() << "expected UnreachableError";
  } catch (const UnreachableError& e) {
    EXPECT_NE(std::string(e.what()).find("t = 0.6"), std::string::npos) << e.what();
  }
}

TEST(Simulation, JointReferenceSingularFallback) {
  // Passing through full extension along the x axis.
  ScenarioConfig c = ScenarioConfig::baseline_scenario();
  CartesianReference cart;
  for (int k = 0; k <= 20; ++k) {
    const double a = -0.1 + 0.01 * k;
    cart.times.push_back(0.01 * k);
    cart.position.emplace_back(2.0 * std::cos(a), 2.0 * std::sin(a));
    cart.velocity.emplace_back(-2.0 * std::sin(a), 2.0 * std::cos(a));
    cart.force.push_back(Eigen::Vector2d::Zero());
  }
  const ReferenceTrajectory ref = cartesian_to_joint_reference(c, cart);
  for (std::size_t k = 1; k + 1 < ref.qdot.size(); ++k) {
    EXPECT_NEAR(ref.qdot[k](0), 1.0, 1e-6);
    EXPECT_TRUE(ref.qdot[k].allFinite());
  }
}

TEST(Simulation, StationaryReferenceWithoutGravityStaysPut) {
  ScenarioConfig c = short_scenario();
  c.arm.g = 0.0;
  const Eigen::Vector2d p(0.5, 0.5);
  CartesianReference cart = line_reference(p, p, 100, 1.0);
  const ReferenceTrajectory ref = cartesian_to_joint_reference(c, cart);
  const TrackingRecord rec = phase2_track(c, ref);
  ASSERT_EQ(rec.times.size(), 101u);
  for (std::size_t k = 0; k < rec.times.size(); ++k) {
    EXPECT_LT(rec.e[k].norm(), 1e-14);
    EXPECT_LT(rec.tau[k].norm(), 1e-12);
  }
}

TEST(Simulation, InitialOffsetIsCorrected) {
  ScenarioConfig c = short_scenario();
  c.arm.g = 0.0;
  c.tracking.initial_offset = Eigen::Vector2d(0.05, -0.05);
  const Eigen::Vector2d p(0.5, 0.5);
  const ReferenceTrajectory ref =
      cartesian_to_joint_reference(c, line_reference(p, p, 1000, 10.0));
  const TrackingRecord rec = phase2_track(c, ref);
  EXPECT_NEAR(rec.e.front().norm(), std::sqrt(0.005), 1e-12);
  EXPECT_LT(rec.e.back().norm(), rec.e.front().norm());
  for (double th : rec.theta_norm) EXPECT_TRUE(std::isfinite(th));
}

TEST(Simulation, RunIsDeterministic) {
  const ScenarioConfig c = short_scenario();
  const SimulationReport a = run_scenario(c);
  const SimulationReport b = run_scenario(c);
  ASSERT_EQ(a.tracking.times.size(), b.tracking.times.size());
  for (std::size_t k = 0; k < a.tracking.times.size(); ++k) {
    EXPECT_EQ(a.tracking.q[k], b.tracking.q[k]);
    EXPECT_EQ(a.tracking.k_r[k], b.tracking.k_r[k]);
  }
  EXPECT_EQ(a.metrics, b.metrics);
}

TEST(Simulation, MetricsPresent) {
  const SimulationReport r = run_scenario(short_scenario());
  for (const char* key :
       {"phase1.cost", "phase1.terminal_state_error", "tracking.max_error_after_settle",
        "tracking.max_ec_final_window", "tracking.max_theta_norm"}) {
    EXPECT_TRUE(std::isfinite(metric(r.metrics, key))) << key;
  }
  EXPECT_THROW(metric(r.metrics, "nope"), DomainError);
}

TEST(Simulation, UnreachableTargetReportsPhase) {
  ScenarioConfig c = short_scenario();
  c.target.position = Eigen::Vector2d(2.5, 0.0);
  try {
    run_scenario(c);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kUnreachable);
    EXPECT_NE(std::string(e.what()).find("reference conversion"), std::string::npos);
  }
}
