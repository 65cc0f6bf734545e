#include "hrc/riccati.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hrc/errors.hpp"
#include "hrc/integrator.hpp"

namespace hrc {
namespace {

constexpr double kTimeSlack = 1e-9;

Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& m) {
  return 0.5 * (m + m.transpose());
}

// (P, V) packed column-major into one vector so the generic RK4 step applies.
Eigen::VectorXd pack(const Eigen::MatrixXd& p, const Eigen::VectorXd& v) {
  const Eigen::Index n = v.size();
  Eigen::VectorXd y(n * n + n);
  y.head(n * n) = Eigen::Map<const Eigen::VectorXd>(p.data(), n * n);
  y.tail(n) = v;
  return y;
}

Eigen::MatrixXd unpack_p(const Eigen::VectorXd& y, Eigen::Index n) {
  return Eigen::Map<const Eigen::MatrixXd>(y.data(), n, n);
}

}  // namespace

LQProblem LQProblem::time_invariant(Eigen::MatrixXd a, Eigen::MatrixXd b,
                                    Eigen::MatrixXd q, Eigen::MatrixXd s,
                                    Eigen::MatrixXd r, double t0, double tf,
                                    Eigen::VectorXd x0, Eigen::VectorXd xf) {
  LQProblem problem;
  problem.a = [a = std::move(a)](double) { return a; };
  problem.b = [b = std::move(b)](double) { return b; };
  problem.q = [q = std::move(q)](double) { return q; };
  problem.s = [s = std::move(s)](double) { return s; };
  problem.r = [r = std::move(r)](double) { return r; };
  problem.t0 = t0;
  problem.tf = tf;
  problem.x0 = std::move(x0);
  problem.xf = std::move(xf);
  return problem;
}

Eigen::Index LQProblem::input_dim() const { return b(t0).cols(); }

LQCoefficients LQProblem::at(double t) const {
  LQCoefficients c{a(t), b(t), q(t), s(t), r(t), {}};
  c.r_inv = c.r.llt().solve(Eigen::MatrixXd::Identity(c.r.rows(), c.r.cols()));
  return c;
}

void LQProblem::validate(int samples) const {
  if (!(tf > t0)) throw DomainError("LQ problem horizon requires tf > t0");
  const Eigen::Index n = x0.size();
  if (n == 0 || xf.size() != n) {
    throw DomainError("LQ problem boundary states must be non-empty and equal length");
  }
  if (!x0.allFinite() || !xf.allFinite()) {
    throw DomainError("LQ problem boundary states must be finite");
  }
  const int count = std::max(samples, 2);
  for (int k = 0; k < count; ++k) {
    const double t = t0 + (tf - t0) * static_cast<double>(k) / (count - 1);
    const Eigen::MatrixXd am = a(t), bm = b(t), qm = q(t), sm = s(t), rm = r(t);
    const Eigen::Index m = bm.cols();
    std::ostringstream where;
    where << " at t = " << t;
    if (am.rows() != n || am.cols() != n) throw DomainError("A must be n x n" + where.str());
    if (bm.rows() != n || m == 0) throw DomainError("B must be n x m" + where.str());
    if (qm.rows() != n || qm.cols() != n) throw DomainError("Q must be n x n" + where.str());
    if (sm.rows() != n || sm.cols() != m) throw DomainError("S must be n x m" + where.str());
    if (rm.rows() != m || rm.cols() != m) throw DomainError("R must be m x m" + where.str());
    if (!am.allFinite() || !bm.allFinite() || !qm.allFinite() ||
        !sm.allFinite() || !rm.allFinite()) {
      throw DomainError("LQ problem matrices must be finite" + where.str());
    }
    const double r_scale = std::max(1.0, rm.cwiseAbs().maxCoeff());
    if ((rm - rm.transpose()).cwiseAbs().maxCoeff() > 1e-12 * r_scale) {
      throw DomainError("R must be symmetric" + where.str());
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> r_eig(rm);
    if (!(r_eig.eigenvalues().minCoeff() > 0.0)) {
      throw DomainError("R must be positive definite" + where.str());
    }
    const double q_scale = std::max(1.0, qm.cwiseAbs().maxCoeff());
    if ((qm - qm.transpose()).cwiseAbs().maxCoeff() > 1e-12 * q_scale) {
      throw DomainError("Q must be symmetric" + where.str());
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> q_eig(qm);
    if (q_eig.eigenvalues().minCoeff() < -1e-12 * q_scale) {
      throw DomainError("Q must be positive semidefinite" + where.str());
    }
  }
}

Eigen::MatrixXd riccati_rhs(const LQCoefficients& c, const Eigen::MatrixXd& p) {
  const Eigen::MatrixXd ap = c.a * p;
  const Eigen::MatrixXd w = p * c.s + c.b;
  const Eigen::MatrixXd rhs =
      ap + ap.transpose() + p * c.q * p - w * c.r_inv * w.transpose();
  return symmetrized(rhs);
}

Eigen::MatrixXd riccati_rhs(const LQProblem& problem, double t,
                            const Eigen::MatrixXd& p) {
  return riccati_rhs(problem.at(t), p);
}

Eigen::VectorXd v_rhs(const LQCoefficients& c, const Eigen::MatrixXd& p,
                      const Eigen::VectorXd& v) {
  const Eigen::MatrixXd r_inv_st = c.r_inv * c.s.transpose();
  const Eigen::MatrixXd m = c.a - c.b * r_inv_st + p * c.q - p * c.s * r_inv_st;
  return m * v;
}

Eigen::VectorXd v_rhs(const LQProblem& problem, double t,
                      const Eigen::MatrixXd& p, const Eigen::VectorXd& v) {
  return v_rhs(problem.at(t), p, v);
}

RiccatiSolution::RiccatiSolution(double t0, double tf,
                                 std::vector<Eigen::MatrixXd> p,
                                 std::vector<Eigen::VectorXd> v, int guard_steps)
    : t0_(t0), tf_(tf), p_(std::move(p)), v_(std::move(v)),
      guard_steps_(guard_steps) {
  if (p_.size() < 2 || p_.size() != v_.size()) {
    throw DomainError("Riccati solution needs at least two matching samples");
  }
  if (guard_steps_ < 0 || guard_steps_ >= intervals()) {
    throw DomainError("guard window must be shorter than the horizon");
  }
  step_ = (tf_ - t0_) / intervals();
}

double RiccatiSolution::time(int k) const {
  return k == intervals() ? tf_ : t0_ + k * step_;
}

std::pair<int, double> RiccatiSolution::locate(double t) const {
  if (!(t >= t0_ - kTimeSlack && t <= tf_ + kTimeSlack)) {
    std::ostringstream msg;
    msg << "time " << t << " outside Riccati horizon [" << t0_ << ", " << tf_ << "]";
    throw DomainError(msg.str());
  }
  const double s = std::clamp((t - t0_) / step_, 0.0, static_cast<double>(intervals()));
  const int k = std::min(static_cast<int>(s), intervals() - 1);
  return {k, std::clamp(s - k, 0.0, 1.0)};
}

Eigen::MatrixXd RiccatiSolution::p_at(double t) const {
  const auto [k, w] = locate(t);
  if (w == 0.0) return p_[k];
  return (1.0 - w) * p_[k] + w * p_[k + 1];
}

Eigen::VectorXd RiccatiSolution::v_at(double t) const {
  const auto [k, w] = locate(t);
  if (w == 0.0) return v_[k];
  return (1.0 - w) * v_[k] + w * v_[k + 1];
}

int grid_intervals(double t0, double tf, double step) {
  if (!(step > 0.0) || !std::isfinite(step)) {
    throw DomainError("integration step must be positive and finite");
  }
  const double span = tf - t0;
  if (!(span > 0.0)) throw DomainError("horizon requires tf > t0");
  const double ratio = span / step;
  const double rounded = std::round(ratio);
  if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-9 * std::max(1.0, ratio)) {
    std::ostringstream msg;
    msg << "step " << step << " does not divide the horizon length " << span;
    throw DomainError(msg.str());
  }
  return static_cast<int>(rounded);
}

RiccatiSolution solve_riccati_backward(const LQProblem& problem, double step,
                                       int guard_steps) {
  const int intervals = grid_intervals(problem.t0, problem.tf, step);
  const double h = (problem.tf - problem.t0) / intervals;
  const Eigen::Index n = problem.state_dim();

  auto rhs = [&](double t, const Eigen::VectorXd& y) -> Eigen::VectorXd {
    const LQCoefficients c = problem.at(t);
    const Eigen::MatrixXd p = unpack_p(y, n);
    return pack(riccati_rhs(c, p), v_rhs(c, p, y.tail(n)));
  };

  std::vector<Eigen::MatrixXd> p(intervals + 1);
  std::vector<Eigen::VectorXd> v(intervals + 1);
  p[intervals] = Eigen::MatrixXd::Zero(n, n);
  v[intervals] = problem.xf;

  Eigen::VectorXd y = pack(p[intervals], v[intervals]);
  for (int k = intervals; k > 0; --k) {
    const double t = k == intervals ? problem.tf : problem.t0 + k * h;
    try {
      y = rk4_step(rhs, t, y, -h);
    } catch (const NumericalError& e) {
      throw NumericalError(std::string("Riccati integration diverged: ") + e.what());
    }
    p[k - 1] = unpack_p(y, n);
    v[k - 1] = y.tail(n);
  }
  return RiccatiSolution(problem.t0, problem.tf, std::move(p), std::move(v),
                         guard_steps);
}

Eigen::VectorXd optimal_control(const LQProblem& problem,
                                const RiccatiSolution& solution, double t,
                                const Eigen::VectorXd& x) {
  const double te = std::min(t, solution.guard_time());
  const LQCoefficients c = problem.at(te);
  const Eigen::MatrixXd p = solution.p_at(te);
  const Eigen::VectorXd residual = solution.v_at(te) - x;
  const Eigen::VectorXd y =
      Eigen::JacobiSVD<Eigen::MatrixXd>(p, Eigen::ComputeThinU | Eigen::ComputeThinV)
          .solve(residual);
  return c.r_inv * (c.b.transpose() * y - c.s.transpose() * x);
}

namespace {

// Constant input over the last `steps` RK4 steps that lands closest to Xf.
// The system is linear, so X(tf) = free response + G u with the columns of G
// obtained by stepping unit inputs through the same scheme.
Eigen::VectorXd terminal_control(const LQProblem& problem, double t_start,
                                 const Eigen::VectorXd& x, double h, int steps) {
  const Eigen::Index n = problem.state_dim();
  const Eigen::Index m = problem.input_dim();
  auto propagate = [&](Eigen::VectorXd state, const Eigen::VectorXd& u) {
    auto f = [&](double t, const Eigen::VectorXd& y) -> Eigen::VectorXd {
      return problem.a(t) * y + problem.b(t) * u;
    };
    for (int k = 0; k < steps; ++k) state = rk4_step(f, t_start + k * h, state, h);
    return state;
  };
  const Eigen::VectorXd free = propagate(x, Eigen::VectorXd::Zero(m));
  Eigen::MatrixXd g(n, m);
  for (Eigen::Index j = 0; j < m; ++j) {
    g.col(j) = propagate(Eigen::VectorXd::Zero(n), Eigen::VectorXd::Unit(m, j));
  }
  return g.colPivHouseholderQr().solve(problem.xf - free);
}

}  // namespace

OptimalTrajectory rollout(const LQProblem& problem,
                          const RiccatiSolution& solution, double step) {
  if (!(step > 0.0)) throw DomainError("rollout step must be positive");
  const double ratio = solution.step() / step;
  const int refine = static_cast<int>(std::lround(ratio));
  if (refine < 1 || std::abs(ratio - refine) > 1e-9 * ratio) {
    throw DomainError("rollout step must be the Riccati step divided by an integer");
  }
  const int intervals = solution.intervals() * refine;
  const double h = (problem.tf - problem.t0) / intervals;
  const double guard = solution.guard_time();

  OptimalTrajectory traj;
  traj.times.reserve(intervals + 1);
  traj.states.reserve(intervals + 1);
  traj.controls.reserve(intervals + 1);

  bool held = false;
  Eigen::VectorXd u_held;
  auto control = [&](double t, const Eigen::VectorXd& x) -> Eigen::VectorXd {
    return held ? u_held : optimal_control(problem, solution, t, x);
  };
  auto dynamics = [&](double t, const Eigen::VectorXd& x) -> Eigen::VectorXd {
    return problem.a(t) * x + problem.b(t) * control(t, x);
  };

  Eigen::VectorXd x = problem.x0;
  for (int i = 0; i <= intervals; ++i) {
    const double t = i == intervals ? problem.tf : problem.t0 + i * h;
    if (!held && t >= guard - kTimeSlack) {
      u_held = terminal_control(problem, t, x, h, intervals - i);
      held = true;
    }
    traj.times.push_back(t);
    traj.states.push_back(x);
    traj.controls.push_back(control(t, x));
    if (i == intervals) break;
    try {
      x = rk4_step(dynamics, t, x, h);
    } catch (const NumericalError& e) {
      throw NumericalError(std::string("optimal rollout diverged: ") + e.what());
    }
  }
  traj.cost = cost(problem, traj);
  return traj;
}

double cost(const LQProblem& problem, const OptimalTrajectory& trajectory) {
  const auto& ts = trajectory.times;
  if (ts.size() < 2) return 0.0;
  auto integrand = [&](std::size_t k) {
    const double t = ts[k];
    const Eigen::VectorXd& x = trajectory.states[k];
    const Eigen::VectorXd& u = trajectory.controls[k];
    return x.dot(problem.q(t) * x) + 2.0 * x.dot(problem.s(t) * u) +
           u.dot(problem.r(t) * u);
  };
  double total = 0.0;
  double previous = integrand(0);
  for (std::size_t k = 1; k < ts.size(); ++k) {
    const double current = integrand(k);
    total += 0.5 * (ts[k] - ts[k - 1]) * (previous + current);
    previous = current;
  }
  return 0.5 * total;
}

}  // namespace hrc
