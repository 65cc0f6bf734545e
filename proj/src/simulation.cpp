#include "hrc/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <tuple>

#include "hrc/errors.hpp"
#include "hrc/integrator.hpp"
#include "hrc/manipulator.hpp"
#include "hrc/tracking_controller.hpp"

namespace hrc {
namespace {

struct Interpolated {
  Eigen::Vector2d q;
  Eigen::Vector2d qdot;
  Eigen::Vector2d force;
};

Interpolated interpolate_reference(const ReferenceTrajectory& ref, double t) {
  const auto& ts = ref.cartesian.times;
  const std::size_t last = ts.size() - 1;
  if (t <= ts.front()) return {ref.q.front(), ref.qdot.front(), ref.cartesian.force.front()};
  if (t >= ts.back()) return {ref.q.back(), ref.qdot.back(), ref.cartesian.force.back()};
  const double step = (ts.back() - ts.front()) / static_cast<double>(last);
  const std::size_t k =
      std::min(static_cast<std::size_t>((t - ts.front()) / step), last - 1);
  const double w = std::clamp((t - ts[k]) / (ts[k + 1] - ts[k]), 0.0, 1.0);
  return {(1.0 - w) * ref.q[k] + w * ref.q[k + 1],
          (1.0 - w) * ref.qdot[k] + w * ref.qdot[k + 1],
          (1.0 - w) * ref.cartesian.force[k] + w * ref.cartesian.force[k + 1]};
}

[[noreturn]] void rethrow_with_phase(const Error& e, const char* phase) {
  throw Error(e.kind(), std::string(phase) + ": " + e.what());
}

double max_norm_where(const std::vector<double>& times,
                      const std::vector<Eigen::Vector2d>& values,
                      double t_from) {
  double out = 0.0;
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (times[k] > t_from) out = std::max(out, values[k].norm());
  }
  return out;
}

}  // namespace

LQProblem build_problem(const ScenarioConfig& config) {
  LQProblem problem;
  const ImpedanceParams imp = config.impedance;
  const HumanParams human = config.human;
  problem.a = [imp, human](double t) -> Eigen::MatrixXd {
    return unified_matrices(imp, human, t).a;
  };
  problem.b = [imp, human](double t) -> Eigen::MatrixXd {
    return unified_matrices(imp, human, t).b;
  };
  problem.q = [s = config.cost.q](double t) { return s.evaluate(t); };
  problem.r = [s = config.cost.r](double t) { return s.evaluate(t); };
  problem.s = [s = config.cost.s](double t) { return s.evaluate(t); };
  problem.t0 = config.t0;
  problem.tf = config.tf;
  problem.x0 = config.initial.stacked();
  problem.xf = config.target.stacked();
  return problem;
}

Phase1Result phase1_optimize(const ScenarioConfig& config) {
  const LQProblem problem = build_problem(config);
  const RiccatiSolution solution = solve_riccati_backward(problem, config.optimize_step);

  Phase1Result result;
  result.optimal = rollout(problem, solution, solution.step());
  CartesianReference& cart = result.cartesian;
  cart.times = result.optimal.times;
  for (const Eigen::VectorXd& x : result.optimal.states) {
    cart.position.emplace_back(x(0), x(1));
    cart.velocity.emplace_back(x(2), x(3));
    cart.force.emplace_back(x(4), x(5));
  }
  return result;
}

ReferenceTrajectory cartesian_to_joint_reference(const ScenarioConfig& config,
                                                 const CartesianReference& cartesian) {
  const ManipulatorParams& arm = config.arm;
  const std::size_t count = cartesian.times.size();
  ReferenceTrajectory ref;
  ref.cartesian = cartesian;
  ref.q.reserve(count);
  ref.qdot.resize(count);
  std::vector<bool> singular(count, false);

  for (std::size_t k = 0; k < count; ++k) {
    Eigen::Vector2d q;
    try {
      q = inverse_kinematics(arm, cartesian.position[k], config.tracking.branch);
    } catch (const UnreachableError& e) {
      std::ostringstream msg;
      msg << "reference sample at t = " << cartesian.times[k]
          << " is unreachable: " << e.what();
      throw UnreachableError(msg.str());
    }
    if (k > 0) {
      // Keep q1 continuous across the atan2 cut.
      const double turns =
          std::round((ref.q.back()(0) - q(0)) / (2.0 * std::numbers::pi));
      q(0) += 2.0 * std::numbers::pi * turns;
    }
    ref.q.push_back(q);

    const Eigen::Matrix2d j = jacobian(arm, q);
    if (std::abs(j.determinant()) >= kDefaultSingularityThreshold) {
      ref.qdot[k] = j.partialPivLu().solve(cartesian.velocity[k]);
    } else {
      singular[k] = true;
    }
  }
  for (std::size_t k = 0; k < count; ++k) {
    if (!singular[k] || count < 2) continue;
    const std::size_t lo = k == 0 ? 0 : k - 1;
    const std::size_t hi = k + 1 == count ? k : k + 1;
    ref.qdot[k] = (ref.q[hi] - ref.q[lo]) / (cartesian.times[hi] - cartesian.times[lo]);
  }
  return ref;
}

TrackingRecord phase2_track(const ScenarioConfig& config,
                            const ReferenceTrajectory& reference) {
  TrackingRecord rec;
  const auto& grid = reference.cartesian.times;
  if (grid.empty()) return rec;

  const ManipulatorParams& arm = config.arm;
  const ControllerGains& gains = config.gains;
  const RbfNetwork net = RbfNetwork::seeded(config.rbf.nodes, config.rbf.seed,
                                            config.rbf.width, config.rbf.input_scale());
  const Eigen::Index nodes = net.nodes();

  // y = [q (2), qdot (2), int e (2), theta (nodes)]
  auto controller_at = [&](double t, const Eigen::VectorXd& y) {
    const Interpolated ref = interpolate_reference(reference, t);
    const Eigen::Vector2d e = ref.q - y.segment<2>(0);
    const Eigen::Vector2d e_dot = ref.qdot - y.segment<2>(2);
    return std::tuple{ref, e, e_dot,
                      evaluate_controller(net, gains, e, e_dot, y.segment<2>(4),
                                          y.tail(nodes))};
  };
  auto dynamics = [&](double t, const Eigen::VectorXd& y) -> Eigen::VectorXd {
    const auto [ref, e, e_dot, out] = controller_at(t, y);
    JointState s;
    s.q = y.segment<2>(0);
    s.qdot = y.segment<2>(2);
    Eigen::VectorXd dy(y.size());
    dy.segment<2>(0) = s.qdot;
    dy.segment<2>(2) = forward_dynamics(arm, s, out.tau, ref.force);
    dy.segment<2>(4) = e;
    dy.tail(nodes) = out.theta_dot;
    return dy;
  };

  Eigen::VectorXd y = Eigen::VectorXd::Zero(6 + nodes);
  y.segment<2>(0) = reference.q.front() + config.tracking.initial_offset;
  // The arm starts at rest.

  auto record = [&](double t) {
    const auto [ref, e, e_dot, out] = controller_at(t, y);
    rec.times.push_back(t);
    rec.q.push_back(y.segment<2>(0));
    rec.qdot.push_back(y.segment<2>(2));
    rec.q_desired.push_back(ref.q);
    rec.e.push_back(e);
    rec.e_dot.push_back(e_dot);
    rec.e_int.push_back(y.segment<2>(4));
    rec.e_c.push_back(out.e_c);
    rec.tau.push_back(out.tau);
    rec.k_r.push_back(out.k_r);
    rec.theta_norm.push_back(y.tail(nodes).norm());
  };

  const std::size_t intervals = grid.size() - 1;
  const int refine = intervals == 0
                         ? 1
                         : std::max<int>(1, static_cast<int>(std::lround(
                                                (grid.back() - grid.front()) /
                                                intervals / config.tracking.step)));
  record(grid.front());
  for (std::size_t k = 0; k < intervals; ++k) {
    const double h = (grid[k + 1] - grid[k]) / refine;
    for (int sub = 0; sub < refine; ++sub) {
      const double t = grid[k] + sub * h;
      try {
        y = rk4_step(dynamics, t, y, h);
      } catch (const NumericalError& e) {
        throw NumericalError(std::string("closed-loop tracking diverged: ") + e.what());
      }
    }
    record(grid[k + 1]);
  }
  return rec;
}

Metrics compute_metrics(const ScenarioConfig& config, const Phase1Result& phase1,
                        const TrackingRecord& tracking) {
  Metrics m;
  const auto& opt = phase1.optimal;
  const Eigen::VectorXd xf = config.target.stacked();
  if (!opt.states.empty()) {
    const Eigen::VectorXd& last = opt.states.back();
    m.emplace_back("phase1.cost", opt.cost);
    m.emplace_back("phase1.terminal_state_error", (last - xf).norm());
    m.emplace_back("phase1.boundary_tolerance", 1e-3 * (1.0 + xf.norm()));
    m.emplace_back("phase1.terminal_position_error",
                   (last.head<2>() - xf.head<2>()).norm());
    m.emplace_back("phase1.terminal_speed", last.segment<2>(2).norm());
    m.emplace_back("phase1.max_force_norm",
                   max_norm_where(phase1.cartesian.times, phase1.cartesian.force,
                                  -std::numeric_limits<double>::infinity()));
  }
  if (!tracking.times.empty()) {
    const double t_end = tracking.times.back();
    const double all = -std::numeric_limits<double>::infinity();
    m.emplace_back("tracking.max_error_after_settle",
                   max_norm_where(tracking.times, tracking.e, config.tracking.settle_time));
    m.emplace_back("tracking.final_error_norm", tracking.e.back().norm());
    m.emplace_back("tracking.max_ec", max_norm_where(tracking.times, tracking.e_c, all));
    m.emplace_back("tracking.max_ec_final_window",
                   max_norm_where(tracking.times, tracking.e_c,
                                  t_end - config.tracking.final_window));
    m.emplace_back("tracking.max_theta_norm",
                   *std::max_element(tracking.theta_norm.begin(),
                                     tracking.theta_norm.end()));
    m.emplace_back("tracking.max_torque_norm",
                   max_norm_where(tracking.times, tracking.tau, all));
  }
  return m;
}

SimulationReport run_scenario(const ScenarioConfig& config) {
  SimulationReport report;
  report.config = config;
  report.config.validate();
  try {
    report.phase1 = phase1_optimize(report.config);
  } catch (const Error& e) {
    rethrow_with_phase(e, "phase 1 (trajectory optimization)");
  }
  try {
    report.reference = cartesian_to_joint_reference(report.config, report.phase1.cartesian);
  } catch (const Error& e) {
    rethrow_with_phase(e, "reference conversion");
  }
  try {
    report.tracking = phase2_track(report.config, report.reference);
  } catch (const Error& e) {
    rethrow_with_phase(e, "phase 2 (tracking control)");
  }
  report.metrics = compute_metrics(report.config, report.phase1, report.tracking);
  return report;
}

double metric(const Metrics& metrics, const std::string& name) {
  for (const auto& [key, value] : metrics) {
    if (key == name) return value;
  }
  throw DomainError("unknown metric " + name);
}

}  // namespace hrc
