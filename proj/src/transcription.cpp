#include "hrc/transcription.hpp"

#include <cmath>
#include <sstream>

#include "hrc/errors.hpp"

namespace hrc {

TranscriptionResult transcription_oracle(const LQProblem& problem, int intervals) {
  if (intervals < 2) throw DomainError("transcription needs at least 2 intervals");
  const Eigen::Index n = problem.state_dim();
  const Eigen::Index m = problem.input_dim();
  const Eigen::Index block = n + m;
  const Eigen::Index nodes = intervals + 1;
  const Eigen::Index num_vars = nodes * block;
  const Eigen::Index num_cons = 2 * n + intervals * n;
  const double h = (problem.tf - problem.t0) / intervals;

  std::vector<double> times(nodes);
  std::vector<Eigen::MatrixXd> a(nodes), b(nodes);
  for (Eigen::Index k = 0; k < nodes; ++k) {
    times[k] = k == intervals ? problem.tf : problem.t0 + k * h;
    a[k] = problem.a(times[k]);
    b[k] = problem.b(times[k]);
  }

  // z = [x_0; u_0; x_1; u_1; ...], cost = 1/2 z' H z with trapezoid weights.
  Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(num_vars + num_cons, num_vars + num_cons);
  for (Eigen::Index k = 0; k < nodes; ++k) {
    const double w = (k == 0 || k == intervals) ? 0.5 * h : h;
    const Eigen::MatrixXd s = problem.s(times[k]);
    auto hk = kkt.block(k * block, k * block, block, block);
    hk.topLeftCorner(n, n) = w * problem.q(times[k]);
    hk.topRightCorner(n, m) = w * s;
    hk.bottomLeftCorner(m, n) = w * s.transpose();
    hk.bottomRightCorner(m, m) = w * problem.r(times[k]);
  }

  Eigen::MatrixXd e = Eigen::MatrixXd::Zero(num_cons, num_vars);
  Eigen::VectorXd d = Eigen::VectorXd::Zero(num_cons);
  const Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(n, n);
  e.block(0, 0, n, n) = identity;
  d.head(n) = problem.x0;
  e.block(n, intervals * block, n, n) = identity;
  d.segment(n, n) = problem.xf;
  for (Eigen::Index k = 0; k < intervals; ++k) {
    const Eigen::Index row = 2 * n + k * n;
    const Eigen::Index c0 = k * block;
    const Eigen::Index c1 = (k + 1) * block;
    e.block(row, c0, n, n) = -identity - 0.5 * h * a[k];
    e.block(row, c0 + n, n, m) = -0.5 * h * b[k];
    e.block(row, c1, n, n) = identity - 0.5 * h * a[k + 1];
    e.block(row, c1 + n, n, m) = -0.5 * h * b[k + 1];
  }
  kkt.bottomLeftCorner(num_cons, num_vars) = e;
  kkt.topRightCorner(num_vars, num_cons) = e.transpose();

  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(num_vars + num_cons);
  rhs.tail(num_cons) = d;

  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(kkt);
  const double rcond = lu.rcond();
  const Eigen::VectorXd sol = lu.solve(rhs);
  const double residual = (kkt * sol - rhs).norm();
  if (!(rcond > 1e-14) || !sol.allFinite() ||
      residual > 1e-6 * std::max(1.0, rhs.norm())) {
    std::ostringstream msg;
    msg << "transcription KKT system is singular (rcond " << rcond
        << ", residual " << residual << ")";
    throw SingularityError(msg.str());
  }

  const Eigen::VectorXd z = sol.head(num_vars);
  TranscriptionResult result;
  result.times = std::move(times);
  result.states.reserve(nodes);
  result.controls.reserve(nodes);
  for (Eigen::Index k = 0; k < nodes; ++k) {
    result.states.push_back(z.segment(k * block, n));
    result.controls.push_back(z.segment(k * block + n, m));
  }
  result.cost = 0.5 * z.dot(kkt.topLeftCorner(num_vars, num_vars) * z);
  return result;
}

}  // namespace hrc
