#pragma once

// Two-phase collaboration pipeline:
//   1. optimize the unified human-robot state between the boundary states
//      with the inverse Riccati solver,
//   2. convert the Cartesian plan to a joint reference and track it on the
//      simulated arm with the neuro-adaptive PID controller.

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "hrc/riccati.hpp"
#include "hrc/scenario.hpp"

namespace hrc {

struct CartesianReference {
  std::vector<double> times;
  std::vector<Eigen::Vector2d> position;  // x_imp
  std::vector<Eigen::Vector2d> velocity;  // xdot_imp
  std::vector<Eigen::Vector2d> force;     // f_h
};

struct Phase1Result {
  OptimalTrajectory optimal;
  CartesianReference cartesian;
};

struct ReferenceTrajectory {
  CartesianReference cartesian;
  std::vector<Eigen::Vector2d> q;     // q_d
  std::vector<Eigen::Vector2d> qdot;  // qdot_d
};

struct TrackingRecord {
  std::vector<double> times;
  std::vector<Eigen::Vector2d> q;
  std::vector<Eigen::Vector2d> qdot;
  std::vector<Eigen::Vector2d> q_desired;
  std::vector<Eigen::Vector2d> e;
  std::vector<Eigen::Vector2d> e_dot;
  std::vector<Eigen::Vector2d> e_int;
  std::vector<Eigen::Vector2d> e_c;
  std::vector<Eigen::Vector2d> tau;
  std::vector<double> k_r;
  std::vector<double> theta_norm;
};

using Metrics = std::vector<std::pair<std::string, double>>;

struct SimulationReport {
  ScenarioConfig config;
  Phase1Result phase1;
  ReferenceTrajectory reference;
  TrackingRecord tracking;
  Metrics metrics;
};

/// Unified-system LQ problem for the scenario.
LQProblem build_problem(const ScenarioConfig& config);

Phase1Result phase1_optimize(const ScenarioConfig& config);

/// Branch-continuous IK of the Cartesian plan; qdot_d = J^-1 xdot_imp, or a
/// finite difference of q_d where |det J| < 1e-6. Throws UnreachableError
/// naming the offending time.
ReferenceTrajectory cartesian_to_joint_reference(const ScenarioConfig& config,
                                                 const CartesianReference& cartesian);

/// Closed-loop RK4 of (q, qdot, int e, theta) with the reference interpolated
/// linearly between grid nodes and f_h replayed as an exogenous force.
/// Samples are recorded on the reference grid.
TrackingRecord phase2_track(const ScenarioConfig& config,
                            const ReferenceTrajectory& reference);

Metrics compute_metrics(const ScenarioConfig& config, const Phase1Result& phase1,
                        const TrackingRecord& tracking);

/// Full pipeline; deterministic for a given config. Errors keep their kind
/// and gain a phase label.
SimulationReport run_scenario(const ScenarioConfig& config);

/// Value of a named metric; DomainError when missing.
double metric(const Metrics& metrics, const std::string& name);

}  // namespace hrc
