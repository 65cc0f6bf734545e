#pragma once

// Fixed-endpoint finite-horizon LQ optimal control through the inverse
// differential Riccati equation.
//
// For  Xdot = A X + B u,  X(t0) = X0,  X(tf) = Xf  and cost
//   E = 1/2 int (X'QX + 2X'Su + u'Ru) dt
// the optimal feedback is
//   u* = -R^-1 S' X + R^-1 B' P^-1 (V - X)
// with P, V integrated backward from P(tf) = 0, V(tf) = Xf:
//   Pdot = A P + P A' + P Q P - (P S + B) R^-1 (S' P + B')
//   Vdot = (A - B R^-1 S' + P Q - P S R^-1 S') V.
// P(tf) = 0 makes the feedback gain unbounded at tf, which is what enforces
// X(tf) = Xf; over the last `guard_steps` grid intervals u is held constant.

#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace hrc {

using MatrixFunction = std::function<Eigen::MatrixXd(double)>;

/// Problem matrices evaluated at one instant.
struct LQCoefficients {
  Eigen::MatrixXd a, b, q, s, r;
  Eigen::MatrixXd r_inv;
};

struct LQProblem {
  MatrixFunction a, b, q, s, r;
  double t0 = 0.0;
  double tf = 1.0;
  Eigen::VectorXd x0;
  Eigen::VectorXd xf;

  static LQProblem time_invariant(Eigen::MatrixXd a, Eigen::MatrixXd b,
                                  Eigen::MatrixXd q, Eigen::MatrixXd s,
                                  Eigen::MatrixXd r, double t0, double tf,
                                  Eigen::VectorXd x0, Eigen::VectorXd xf);

  Eigen::Index state_dim() const { return x0.size(); }
  Eigen::Index input_dim() const;

  LQCoefficients at(double t) const;

  /// Shapes, tf > t0, R symmetric positive definite and Q symmetric positive
  /// semidefinite at `samples` evenly spaced times. Throws DomainError.
  void validate(int samples = 100) const;
};

Eigen::MatrixXd riccati_rhs(const LQCoefficients& c, const Eigen::MatrixXd& p);
Eigen::MatrixXd riccati_rhs(const LQProblem& problem, double t,
                            const Eigen::MatrixXd& p);

Eigen::VectorXd v_rhs(const LQCoefficients& c, const Eigen::MatrixXd& p,
                      const Eigen::VectorXd& v);
Eigen::VectorXd v_rhs(const LQProblem& problem, double t,
                      const Eigen::MatrixXd& p, const Eigen::VectorXd& v);

/// P and V sampled on a uniform grid over [t0, tf], linear in between.
class RiccatiSolution {
 public:
  RiccatiSolution(double t0, double tf, std::vector<Eigen::MatrixXd> p,
                  std::vector<Eigen::VectorXd> v, int guard_steps);

  double t0() const { return t0_; }
  double tf() const { return tf_; }
  double step() const { return step_; }
  int intervals() const { return static_cast<int>(p_.size()) - 1; }
  int guard_steps() const { return guard_steps_; }
  /// Start of the terminal window where the control is held.
  double guard_time() const { return time(intervals() - guard_steps_); }

  /// Grid node time; node `intervals()` is exactly tf.
  double time(int k) const;
  const Eigen::MatrixXd& p(int k) const { return p_[k]; }
  const Eigen::VectorXd& v(int k) const { return v_[k]; }

  /// Linear interpolation; DomainError outside [t0, tf].
  Eigen::MatrixXd p_at(double t) const;
  Eigen::VectorXd v_at(double t) const;

 private:
  std::pair<int, double> locate(double t) const;

  double t0_;
  double tf_;
  double step_;
  std::vector<Eigen::MatrixXd> p_;
  std::vector<Eigen::VectorXd> v_;
  int guard_steps_;
};

inline constexpr int kDefaultGuardSteps = 10;

/// Number of grid intervals for `step` over [t0, tf]; DomainError unless the
/// step divides the horizon to within 1e-9 relative.
int grid_intervals(double t0, double tf, double step);

/// Backward RK4 from P(tf) = 0, V(tf) = Xf. Throws NumericalError on
/// divergence and DomainError on a bad step.
RiccatiSolution solve_riccati_backward(const LQProblem& problem, double step,
                                       int guard_steps = kDefaultGuardSteps);

/// Feedback law at (t, x). P y = V - x is solved in the least-squares sense.
/// Times inside the terminal guard window are clamped to its start.
Eigen::VectorXd optimal_control(const LQProblem& problem,
                                const RiccatiSolution& solution, double t,
                                const Eigen::VectorXd& x);

struct OptimalTrajectory {
  std::vector<double> times;
  std::vector<Eigen::VectorXd> states;
  std::vector<Eigen::VectorXd> controls;
  double cost = 0.0;
};

/// Forward RK4 of Xdot = A X + B u*(t, X) from X0 on a grid whose step is
/// solution.step() / k for an integer k >= 1. From the first node inside the
/// guard window the input is held at the constant value that brings the
/// discrete state closest to Xf.
OptimalTrajectory rollout(const LQProblem& problem,
                          const RiccatiSolution& solution, double step);

/// 1/2 int (X'QX + 2X'Su + u'Ru) dt by the trapezoidal rule on the
/// trajectory's own grid.
double cost(const LQProblem& problem, const OptimalTrajectory& trajectory);

}  // namespace hrc
