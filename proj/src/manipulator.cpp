#include "hrc/manipulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "hrc/errors.hpp"
#include "hrc/random.hpp"

namespace hrc {
namespace {

// Lumped inertia coefficients of the uniform-rod model:
// M_r = [[a + 2 b cos q2, d + b cos q2], [d + b cos q2, d]].
struct InertiaCoefficients {
  double a;
  double b;
  double d;
};

InertiaCoefficients inertia_coefficients(const ManipulatorParams& p) {
  const double lc1 = 0.5 * p.l1;
  const double lc2 = 0.5 * p.l2;
  return {p.i1 + p.i2 + p.m1 * lc1 * lc1 + p.m2 * (p.l1 * p.l1 + lc2 * lc2),
          p.m2 * p.l1 * lc2, p.i2 + p.m2 * lc2 * lc2};
}

}  // namespace

ManipulatorParams ManipulatorParams::uniform_rods(double m1, double m2,
                                                  double l1, double l2,
                                                  double g) {
  ManipulatorParams p;
  p.m1 = m1;
  p.m2 = m2;
  p.l1 = l1;
  p.l2 = l2;
  p.i1 = m1 * l1 * l1 / 12.0;
  p.i2 = m2 * l2 * l2 / 12.0;
  p.g = g;
  return p;
}

void ManipulatorParams::validate() const {
  for (double v : {m1, m2, l1, l2, i1, i2, g}) {
    if (!std::isfinite(v)) throw DomainError("manipulator parameter is not finite");
  }
  if (m1 <= 0 || m2 <= 0) throw DomainError("link masses must be positive");
  if (l1 <= 0 || l2 <= 0) throw DomainError("link lengths must be positive");
  if (i1 < 0 || i2 < 0) throw DomainError("link inertias must be non-negative");
  if (g < 0) throw DomainError("gravitational acceleration must be non-negative");
}

Eigen::Vector2d forward_kinematics(const ManipulatorParams& p,
                                   const Eigen::Vector2d& q) {
  const double q12 = q(0) + q(1);
  return {p.l1 * std::cos(q(0)) + p.l2 * std::cos(q12),
          p.l1 * std::sin(q(0)) + p.l2 * std::sin(q12)};
}

CartesianState forward_kinematics(const ManipulatorParams& p,
                                  const JointState& s) {
  return {forward_kinematics(p, s.q), jacobian(p, s.q) * s.qdot};
}

Eigen::Vector2d inverse_kinematics(const ManipulatorParams& p,
                                   const Eigen::Vector2d& x,
                                   ElbowBranch branch) {
  constexpr double kTolerance = 1e-9;
  const double r = x.norm();
  const double r_min = std::abs(p.l1 - p.l2);
  const double r_max = p.l1 + p.l2;
  if (!std::isfinite(r) || r < r_min - kTolerance || r > r_max + kTolerance) {
    std::ostringstream msg;
    msg << "target (" << x(0) << ", " << x(1) << ") at distance " << r
        << " is outside the workspace [" << r_min << ", " << r_max << "]";
    throw UnreachableError(msg.str());
  }
  const double c2 = std::clamp(
      (r * r - p.l1 * p.l1 - p.l2 * p.l2) / (2.0 * p.l1 * p.l2), -1.0, 1.0);
  double s2 = std::sqrt(std::max(0.0, 1.0 - c2 * c2));
  if (branch == ElbowBranch::kDown) s2 = -s2;
  const double q2 = std::atan2(s2, c2);
  const double q1 =
      std::atan2(x(1), x(0)) - std::atan2(p.l2 * s2, p.l1 + p.l2 * c2);
  return {q1, q2};
}

Eigen::Matrix2d jacobian(const ManipulatorParams& p, const Eigen::Vector2d& q) {
  const double s1 = std::sin(q(0));
  const double c1 = std::cos(q(0));
  const double s12 = std::sin(q(0) + q(1));
  const double c12 = std::cos(q(0) + q(1));
  Eigen::Matrix2d j;
  j << -p.l1 * s1 - p.l2 * s12, -p.l2 * s12,
        p.l1 * c1 + p.l2 * c12,  p.l2 * c12;
  return j;
}

Eigen::Matrix2d jacobian_derivative(const ManipulatorParams& p,
                                    const JointState& s) {
  const double s1 = std::sin(s.q(0));
  const double c1 = std::cos(s.q(0));
  const double s12 = std::sin(s.q(0) + s.q(1));
  const double c12 = std::cos(s.q(0) + s.q(1));
  const double w1 = s.qdot(0);
  const double w12 = s.qdot(0) + s.qdot(1);
  Eigen::Matrix2d jd;
  jd << -p.l1 * c1 * w1 - p.l2 * c12 * w12, -p.l2 * c12 * w12,
        -p.l1 * s1 * w1 - p.l2 * s12 * w12, -p.l2 * s12 * w12;
  return jd;
}

JointDynamicsTerms joint_dynamics_terms(const ManipulatorParams& p,
                                        const JointState& s) {
  const auto [a, b, d] = inertia_coefficients(p);
  const double c2 = std::cos(s.q(1));
  const double s2 = std::sin(s.q(1));

  JointDynamicsTerms terms;
  terms.mass << a + 2.0 * b * c2, d + b * c2,
                d + b * c2,       d;

  // Christoffel symbols of the first kind; all of them are multiples of h.
  const double h = -b * s2;
  terms.coriolis << h * s.qdot(1), h * (s.qdot(0) + s.qdot(1)),
                    -h * s.qdot(0), 0.0;

  const double c1 = std::cos(s.q(0));
  const double c12 = std::cos(s.q(0) + s.q(1));
  const double lc1 = 0.5 * p.l1;
  const double lc2 = 0.5 * p.l2;
  terms.gravity << p.g * ((p.m1 * lc1 + p.m2 * p.l1) * c1 + p.m2 * lc2 * c12),
                   p.g * p.m2 * lc2 * c12;
  return terms;
}

Eigen::Matrix2d mass_matrix_derivative(const ManipulatorParams& p,
                                       const JointState& s) {
  const double b = inertia_coefficients(p).b;
  const double rate = -b * std::sin(s.q(1)) * s.qdot(1);
  Eigen::Matrix2d md;
  md << 2.0 * rate, rate,
        rate,       0.0;
  return md;
}

CartesianDynamicsTerms cartesian_dynamics_terms(const ManipulatorParams& p,
                                                const JointState& s,
                                                double singularity_threshold) {
  const Eigen::Matrix2d j = jacobian(p, s.q);
  const double det = j.determinant();
  if (!(std::abs(det) >= singularity_threshold)) {
    std::ostringstream msg;
    msg << "singular configuration q = (" << s.q(0) << ", " << s.q(1)
        << "), |det J| = " << std::abs(det);
    throw SingularityError(msg.str());
  }
  const Eigen::Matrix2d j_inv = j.inverse();
  const Eigen::Matrix2d j_inv_t = j_inv.transpose();
  const JointDynamicsTerms joint = joint_dynamics_terms(p, s);
  const Eigen::Matrix2d jd = jacobian_derivative(p, s);

  CartesianDynamicsTerms terms;
  terms.mass = j_inv_t * joint.mass * j_inv;
  terms.mass = 0.5 * (terms.mass + terms.mass.transpose()).eval();
  terms.coriolis = j_inv_t * (joint.coriolis - joint.mass * j_inv * jd) * j_inv;
  terms.gravity = j_inv_t * joint.gravity;
  return terms;
}

Eigen::Vector2d forward_dynamics(const ManipulatorParams& p,
                                 const JointState& s,
                                 const Eigen::Vector2d& tau,
                                 const Eigen::Vector2d& f_h) {
  const JointDynamicsTerms terms = joint_dynamics_terms(p, s);
  const Eigen::Vector2d rhs = tau + jacobian(p, s.q).transpose() * f_h -
                              terms.coriolis * s.qdot - terms.gravity;
  return terms.mass.llt().solve(rhs);
}

double mechanical_energy(const ManipulatorParams& p, const JointState& s) {
  const JointDynamicsTerms terms = joint_dynamics_terms(p, s);
  const double kinetic = 0.5 * s.qdot.dot(terms.mass * s.qdot);
  const double y1 = 0.5 * p.l1 * std::sin(s.q(0));
  const double y2 = p.l1 * std::sin(s.q(0)) + 0.5 * p.l2 * std::sin(s.q(0) + s.q(1));
  return kinetic + p.g * (p.m1 * y1 + p.m2 * y2);
}

DynamicsBoundEstimates estimate_dynamics_bounds(const ManipulatorParams& p,
                                                const BoundSampling& sampling) {
  UniformSampler rng(sampling.seed);
  DynamicsBoundEstimates est;
  est.alpha_m = std::numeric_limits<double>::infinity();
  int accepted = 0;
  while (accepted < sampling.samples) {
    JointState s;
    s.q << rng.uniform(-std::numbers::pi, std::numbers::pi),
           rng.uniform(-std::numbers::pi, std::numbers::pi);
    if (std::abs(jacobian(p, s.q).determinant()) < sampling.min_abs_det) continue;
    s.qdot << rng.uniform(-sampling.max_speed, sampling.max_speed),
              rng.uniform(-sampling.max_speed, sampling.max_speed);
    ++accepted;

    const CartesianDynamicsTerms terms = cartesian_dynamics_terms(p, s);
    const double mass_norm = terms.mass.operatorNorm();
    est.alpha_m = std::min(est.alpha_m, mass_norm);
    est.alpha_M = std::max(est.alpha_M, mass_norm);
    if (s.qdot.norm() > 0.0) {
      est.eta = std::max(est.eta, terms.coriolis.operatorNorm() / s.qdot.norm());
    }
    est.delta = std::max(est.delta, terms.gravity.norm());
    est.F = std::max(est.F, jacobian(p, s.q).transpose().operatorNorm() *
                                sampling.max_force);
  }
  est.alpha_m /= sampling.margin;
  est.alpha_M *= sampling.margin;
  est.eta *= sampling.margin;
  est.delta *= sampling.margin;
  est.F *= sampling.margin;
  return est;
}

}  // namespace hrc
