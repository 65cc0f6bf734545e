#pragma once

#include <cstdint>

#include <Eigen/Dense>

#include "hrc/interaction_model.hpp"
#include "hrc/manipulator.hpp"
#include "hrc/tracking_controller.hpp"

namespace hrc {

/// One end of the collaboration task: impedance position/velocity and the
/// human force.
struct BoundaryState {
  Eigen::Vector2d position = Eigen::Vector2d::Zero();
  Eigen::Vector2d velocity = Eigen::Vector2d::Zero();
  Eigen::Vector2d force = Eigen::Vector2d::Zero();

  Vector6d stacked() const;

  bool operator==(const BoundaryState&) const = default;
};

struct CostWeights {
  MatrixSchedule q;  // 6x6, symmetric positive semidefinite
  MatrixSchedule r;  // 2x2, symmetric positive definite
  MatrixSchedule s;  // 6x2
};

struct RbfSettings {
  int nodes = 20;
  std::uint64_t seed = 1;
  double width = 1.0;
  double error_scale = 1.0;       // rad
  double rate_scale = 1.0;        // rad/s
  double commutative_scale = 1.0;

  Eigen::VectorXd input_scale() const;

  bool operator==(const RbfSettings&) const = default;
};

struct TrackingSettings {
  double step = 1e-3;
  Eigen::Vector2d initial_offset = Eigen::Vector2d::Zero();  // added to q_d(t0)
  double settle_time = 2.0;   // tracking error metric covers t > settle_time
  double final_window = 1.0;  // trailing window for e_c metrics
  ElbowBranch branch = ElbowBranch::kDown;

  bool operator==(const TrackingSettings&) const = default;
};

struct ScenarioConfig {
  ManipulatorParams arm;
  ImpedanceParams impedance;
  HumanParams human;
  CostWeights cost;
  BoundaryState initial;
  BoundaryState target;
  double t0 = 0.0;
  double tf = 10.0;
  double optimize_step = 1e-3;
  ControllerGains gains;
  RbfSettings rbf;
  TrackingSettings tracking;
  bool emit_plots = false;

  /// Default two-link collaboration scenario:
  /// m = 5 kg, L = 1 m, M_imp = [[5,1],[1,-3]], B_imp = [[20,0],[5,15]],
  /// K_imp = [[1,0.5],[0,0]], K_d = 10 I, K_p = 2 I, k_e = I, Q = I, R = I,
  /// S = 0, zeta = 0.1, k_rc = 50, alpha = 10, sigma = 0.1, 20 RBF nodes,
  /// start (-0.5, 1) m, target (0.8, -0.6) m at rest.
  static ScenarioConfig baseline_scenario();

  /// Applies the horizon to every schedule. Called by validate().
  void bind_horizon();

  /// Full validation; throws ConfigError naming the offending key.
  void validate();
};

bool operator==(const ScenarioConfig& a, const ScenarioConfig& b);

}  // namespace hrc
