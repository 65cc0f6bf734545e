#include "hrc/tracking_controller.hpp"

#include <cmath>
#include <sstream>

#include "hrc/errors.hpp"
#include "hrc/random.hpp"

namespace hrc {

void ControllerGains::validate(Eigen::Index nodes) const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw DomainError(std::string(name) + " must be positive and finite");
    }
  };
  positive(zeta, "zeta");
  positive(k_rc, "k_rc");
  positive(alpha, "alpha");
  positive(sigma, "sigma");
  if (gamma.size() == 0) return;
  if (gamma.rows() != nodes || gamma.cols() != nodes) {
    std::ostringstream msg;
    msg << "gamma must be " << nodes << "x" << nodes;
    throw DomainError(msg.str());
  }
  if (!gamma.allFinite() || !gamma.isApprox(gamma.transpose(), 0.0)) {
    throw DomainError("gamma must be symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gamma);
  if (!(eig.eigenvalues().minCoeff() > 0.0)) {
    throw DomainError("gamma must be positive definite");
  }
}

Eigen::VectorXd ControllerGains::apply_gamma(const Eigen::VectorXd& v) const {
  return gamma.size() == 0 ? v : Eigen::VectorXd(gamma * v);
}

RbfNetwork::RbfNetwork(Eigen::MatrixXd centers, Eigen::VectorXd widths,
                       Eigen::VectorXd input_scale)
    : centers_(std::move(centers)), widths_(std::move(widths)),
      input_scale_(std::move(input_scale)) {
  if (centers_.rows() < 1 || centers_.cols() != kInputDim) {
    throw DomainError("RBF network needs at least one 6-dimensional center");
  }
  if (widths_.size() != centers_.rows() || !(widths_.minCoeff() > 0.0)) {
    throw DomainError("RBF widths must be positive, one per node");
  }
  if (input_scale_.size() != kInputDim || !(input_scale_.minCoeff() > 0.0)) {
    throw DomainError("RBF input scales must be positive, one per input");
  }
}

RbfNetwork RbfNetwork::seeded(int nodes, std::uint64_t seed, double width,
                              Eigen::VectorXd input_scale) {
  if (nodes < 1) throw DomainError("RBF network needs at least one node");
  UniformSampler rng(seed);
  Eigen::MatrixXd centers(nodes, kInputDim);
  for (int i = 0; i < nodes; ++i) {
    for (Eigen::Index j = 0; j < kInputDim; ++j) centers(i, j) = rng.uniform(-1.0, 1.0);
  }
  return RbfNetwork(std::move(centers), Eigen::VectorXd::Constant(nodes, width),
                    std::move(input_scale));
}

Eigen::VectorXd RbfNetwork::features(const Eigen::VectorXd& z) const {
  const Eigen::VectorXd scaled = z.cwiseQuotient(input_scale_);
  Eigen::VectorXd phi(nodes());
  for (Eigen::Index i = 0; i < nodes(); ++i) {
    const double dist2 = (scaled.transpose() - centers_.row(i)).squaredNorm();
    phi(i) = std::exp(-dist2 / (widths_(i) * widths_(i)));
  }
  return phi;
}

Eigen::Vector2d commutative_error(const Eigen::Vector2d& e,
                                  const Eigen::Vector2d& e_dot,
                                  const Eigen::Vector2d& e_int, double zeta) {
  return 2.0 * zeta * e + zeta * zeta * e_int + e_dot;
}

Eigen::VectorXd network_input(const Eigen::Vector2d& e,
                              const Eigen::Vector2d& e_dot,
                              const Eigen::Vector2d& e_c) {
  Eigen::VectorXd z(6);
  z << e, e_dot, e_c;
  return z;
}

double gain(const RbfNetwork& net, const Eigen::VectorXd& theta_hat,
            const Eigen::VectorXd& z, double alpha) {
  return alpha * theta_hat.dot(net.features(z));
}

Eigen::Vector2d control_torque(const Eigen::Vector2d& e_c, double k_rc, double k_r) {
  return (k_rc + k_r) * e_c;
}

Eigen::VectorXd adapt(const RbfNetwork& net, const Eigen::VectorXd& theta_hat,
                      const Eigen::Vector2d& e_c, const Eigen::VectorXd& z,
                      const ControllerGains& gains) {
  const Eigen::VectorXd drive =
      gains.alpha * e_c.squaredNorm() * net.features(z) - gains.sigma * theta_hat;
  return gains.apply_gamma(drive);
}

ControlOutput evaluate_controller(const RbfNetwork& net,
                                  const ControllerGains& gains,
                                  const Eigen::Vector2d& e,
                                  const Eigen::Vector2d& e_dot,
                                  const Eigen::Vector2d& e_int,
                                  const Eigen::VectorXd& theta_hat) {
  ControlOutput out;
  out.e_c = commutative_error(e, e_dot, e_int, gains.zeta);
  const Eigen::VectorXd z = network_input(e, e_dot, out.e_c);
  const Eigen::VectorXd phi = net.features(z);
  out.k_r = gains.alpha * theta_hat.dot(phi);
  out.tau = control_torque(out.e_c, gains.k_rc, out.k_r);
  out.theta_dot = gains.apply_gamma(gains.alpha * out.e_c.squaredNorm() * phi -
                                    gains.sigma * theta_hat);
  return out;
}

}  // namespace hrc
