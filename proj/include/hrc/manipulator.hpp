#pragma once

// Kinematics and rigid-body dynamics of a planar 2-link arm moving in the
// vertical plane. q1 is measured from the +x axis, q2 relative to link 1,
// gravity acts along -y. Links are uniform rods.

#include <cstdint>

#include <Eigen/Dense>

namespace hrc {

struct ManipulatorParams {
  double m1 = 5.0;
  double m2 = 5.0;
  double l1 = 1.0;
  double l2 = 1.0;
  double i1 = 5.0 / 12.0;  // about the link centre of mass
  double i2 = 5.0 / 12.0;
  double g = 9.81;

  /// Uniform-rod inertias I = m L^2 / 12.
  static ManipulatorParams uniform_rods(double m1, double m2, double l1,
                                        double l2, double g = 9.81);

  /// Throws DomainError when masses/lengths are not positive, inertias are
  /// negative, g < 0, or any field is non-finite.
  void validate() const;

  bool operator==(const ManipulatorParams&) const = default;
};

struct JointState {
  Eigen::Vector2d q = Eigen::Vector2d::Zero();
  Eigen::Vector2d qdot = Eigen::Vector2d::Zero();
};

struct CartesianState {
  Eigen::Vector2d x = Eigen::Vector2d::Zero();
  Eigen::Vector2d xdot = Eigen::Vector2d::Zero();
};

struct JointDynamicsTerms {
  Eigen::Matrix2d mass;
  Eigen::Matrix2d coriolis;  // Christoffel form: coriolis * qdot is the force
  Eigen::Vector2d gravity;
};

struct CartesianDynamicsTerms {
  Eigen::Matrix2d mass;
  Eigen::Matrix2d coriolis;
  Eigen::Vector2d gravity;
};

struct DynamicsBoundEstimates {
  double alpha_m = 0.0;  // lower bound on ||M_c||
  double alpha_M = 0.0;  // upper bound on ||M_c||
  double eta = 0.0;      // ||C_c(q, qdot)|| <= eta ||qdot||
  double delta = 0.0;    // ||G_c(q)|| <= delta
  double F = 0.0;        // ||J^T f_h|| <= F for ||f_h|| <= max_force
};

enum class ElbowBranch { kDown, kUp };  // kDown: q2 <= 0

inline constexpr double kDefaultSingularityThreshold = 1e-6;

Eigen::Vector2d forward_kinematics(const ManipulatorParams& p,
                                   const Eigen::Vector2d& q);
CartesianState forward_kinematics(const ManipulatorParams& p,
                                  const JointState& s);

/// Closed-form IK. Throws UnreachableError when |l1 - l2| <= ||x|| <= l1 + l2
/// fails by more than 1e-9.
Eigen::Vector2d inverse_kinematics(const ManipulatorParams& p,
                                   const Eigen::Vector2d& x,
                                   ElbowBranch branch = ElbowBranch::kDown);

Eigen::Matrix2d jacobian(const ManipulatorParams& p, const Eigen::Vector2d& q);
Eigen::Matrix2d jacobian_derivative(const ManipulatorParams& p,
                                    const JointState& s);

JointDynamicsTerms joint_dynamics_terms(const ManipulatorParams& p,
                                        const JointState& s);

/// Analytic time derivative of the joint-space mass matrix along s.qdot.
Eigen::Matrix2d mass_matrix_derivative(const ManipulatorParams& p,
                                       const JointState& s);

/// Task-space terms M_c = J^-T M_r J^-1, C_c = J^-T (C_r - M_r J^-1 Jdot) J^-1,
/// G_c = J^-T G_r. Throws SingularityError when |det J| < threshold.
CartesianDynamicsTerms cartesian_dynamics_terms(
    const ManipulatorParams& p, const JointState& s,
    double singularity_threshold = kDefaultSingularityThreshold);

/// qddot = M_r^-1 (tau + J^T f_h - C_r qdot - G_r).
Eigen::Vector2d forward_dynamics(const ManipulatorParams& p,
                                 const JointState& s,
                                 const Eigen::Vector2d& tau,
                                 const Eigen::Vector2d& f_h);

/// Kinetic plus gravitational potential energy (zero potential at y = 0).
double mechanical_energy(const ManipulatorParams& p, const JointState& s);

struct BoundSampling {
  int samples = 2000;
  std::uint64_t seed = 7;
  double min_abs_det = 0.1;  // keep away from kinematic singularities
  double max_speed = 2.0;    // rad/s, per joint
  double max_force = 10.0;   // N, bound on ||f_h||
  double margin = 1.1;       // inflation applied to the sampled extremes
};

/// Empirical bound constants for the task-space dynamics, from uniformly
/// sampled configurations with |det J| >= min_abs_det.
DynamicsBoundEstimates estimate_dynamics_bounds(const ManipulatorParams& p,
                                                const BoundSampling& sampling = {});

}  // namespace hrc
