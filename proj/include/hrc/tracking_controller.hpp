#pragma once

// Neuro-adaptive PID joint tracking.
//
//   e_c   = 2 zeta e + zeta^2 int(e) + edot          (commutative error)
//   k_R   = alpha theta' phi(z),  z = [e, edot, e_c]  (RBF-scheduled gain)
//   tau   = (k_rc + k_R) e_c
//   theta_dot = Gamma (alpha ||e_c||^2 phi(z) - sigma theta)

#include <cstdint>

#include <Eigen/Dense>

namespace hrc {

struct ControllerGains {
  double zeta = 0.1;
  double k_rc = 50.0;
  double alpha = 10.0;
  double sigma = 0.1;
  /// Adaptation gain, square with one row per RBF node. Empty means identity.
  Eigen::MatrixXd gamma;

  /// Throws DomainError unless every scalar is > 0 and gamma is symmetric
  /// positive definite of size `nodes`.
  void validate(Eigen::Index nodes) const;

  /// Gamma applied to v, treating an empty gamma as the identity.
  Eigen::VectorXd apply_gamma(const Eigen::VectorXd& v) const;
};

/// Gaussian RBF network over the normalized input z ./ input_scale.
class RbfNetwork {
 public:
  static constexpr Eigen::Index kInputDim = 6;

  RbfNetwork(Eigen::MatrixXd centers, Eigen::VectorXd widths,
             Eigen::VectorXd input_scale);

  /// `nodes` centers drawn uniformly from [-1, 1]^6, all widths equal.
  static RbfNetwork seeded(int nodes, std::uint64_t seed, double width = 1.0,
                           Eigen::VectorXd input_scale = Eigen::VectorXd::Ones(kInputDim));

  Eigen::Index nodes() const { return centers_.rows(); }
  const Eigen::MatrixXd& centers() const { return centers_; }
  const Eigen::VectorXd& widths() const { return widths_; }
  const Eigen::VectorXd& input_scale() const { return input_scale_; }

  /// phi_i = exp(-||z ./ scale - c_i||^2 / w_i^2), each in (0, 1].
  Eigen::VectorXd features(const Eigen::VectorXd& z) const;

 private:
  Eigen::MatrixXd centers_;  // one row per node
  Eigen::VectorXd widths_;
  Eigen::VectorXd input_scale_;
};

Eigen::Vector2d commutative_error(const Eigen::Vector2d& e,
                                  const Eigen::Vector2d& e_dot,
                                  const Eigen::Vector2d& e_int, double zeta);

/// z = [e; e_dot; e_c].
Eigen::VectorXd network_input(const Eigen::Vector2d& e,
                              const Eigen::Vector2d& e_dot,
                              const Eigen::Vector2d& e_c);

double gain(const RbfNetwork& net, const Eigen::VectorXd& theta_hat,
            const Eigen::VectorXd& z, double alpha);

Eigen::Vector2d control_torque(const Eigen::Vector2d& e_c, double k_rc, double k_r);

Eigen::VectorXd adapt(const RbfNetwork& net, const Eigen::VectorXd& theta_hat,
                      const Eigen::Vector2d& e_c, const Eigen::VectorXd& z,
                      const ControllerGains& gains);

struct TrackingState {
  Eigen::Vector2d e = Eigen::Vector2d::Zero();
  Eigen::Vector2d e_int = Eigen::Vector2d::Zero();
  Eigen::Vector2d e_dot = Eigen::Vector2d::Zero();
  Eigen::Vector2d e_c = Eigen::Vector2d::Zero();
  Eigen::VectorXd theta_hat;
};

/// Everything the controller produces at one instant.
struct ControlOutput {
  Eigen::Vector2d e_c;
  double k_r = 0.0;
  Eigen::Vector2d tau;
  Eigen::VectorXd theta_dot;
};

ControlOutput evaluate_controller(const RbfNetwork& net,
                                  const ControllerGains& gains,
                                  const Eigen::Vector2d& e,
                                  const Eigen::Vector2d& e_dot,
                                  const Eigen::Vector2d& e_int,
                                  const Eigen::VectorXd& theta_hat);

}  // namespace hrc
