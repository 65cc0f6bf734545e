#include "hrc/scenario.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "hrc/errors.hpp"
#include "hrc/riccati.hpp"

namespace hrc {
namespace {

constexpr int kValidationSamples = 100;

bool same_matrix(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() && a == b;
}

void require_positive(double v, const std::string& key) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw ConfigError(key, "must be positive and finite");
  }
}

void require_shape(const MatrixSchedule& s, Eigen::Index rows, Eigen::Index cols,
                   const std::string& key) {
  if (s.rows() != rows || s.cols() != cols) {
    std::ostringstream msg;
    msg << "expected a " << rows << "x" << cols << " matrix, got " << s.rows()
        << "x" << s.cols();
    throw ConfigError(key, msg.str());
  }
}

// Schedule value at t; a schedule that does not cover t is a config error.
Eigen::MatrixXd sample(const MatrixSchedule& s, double t, const std::string& key) {
  try {
    return s.evaluate(t);
  } catch (const DomainError& e) {
    throw ConfigError(key, e.what());
  }
}

template <typename Check>
void for_each_sample(double t0, double tf, Check&& check) {
  for (int k = 0; k < kValidationSamples; ++k) {
    check(t0 + (tf - t0) * static_cast<double>(k) / (kValidationSamples - 1));
  }
}

std::string at_time(double t) {
  std::ostringstream out;
  out << " at t = " << t;
  return out.str();
}

void require_invertible(const MatrixSchedule& s, double t0, double tf,
                        const std::string& key) {
  double previous = 0.0;
  for_each_sample(t0, tf, [&](double t) {
    const Eigen::MatrixXd m = sample(s, t, key);
    if (!m.allFinite()) throw ConfigError(key, "not finite" + at_time(t));
    const double det = m.determinant();
    if (!(std::abs(det) > kInvertibilityThreshold) || det * previous < 0.0) {
      throw ConfigError(key, "must be invertible (|det| > 1e-9)" + at_time(t));
    }
    previous = det;
  });
}

void require_symmetric_definite(const MatrixSchedule& s, double t0, double tf,
                                bool strict, const std::string& key) {
  for_each_sample(t0, tf, [&](double t) {
    const Eigen::MatrixXd m = sample(s, t, key);
    if (!m.allFinite()) throw ConfigError(key, "not finite" + at_time(t));
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
      throw ConfigError(key, "must be symmetric" + at_time(t));
    }
    const double lowest =
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(m).eigenvalues().minCoeff();
    if (strict && !(lowest > 0.0)) {
      throw ConfigError(key, "must be positive definite" + at_time(t));
    }
    if (!strict && lowest < -1e-12 * scale) {
      throw ConfigError(key, "must be positive semidefinite" + at_time(t));
    }
  });
}

void require_finite(const Eigen::Vector2d& v, const std::string& key) {
  if (!v.allFinite()) throw ConfigError(key, "must be finite");
}

}  // namespace

Vector6d BoundaryState::stacked() const {
  Vector6d x;
  x << position, velocity, force;
  return x;
}

Eigen::VectorXd RbfSettings::input_scale() const {
  Eigen::VectorXd scale(6);
  scale << error_scale, error_scale, rate_scale, rate_scale, commutative_scale,
      commutative_scale;
  return scale;
}

ScenarioConfig ScenarioConfig::baseline_scenario() {
  ScenarioConfig c;
  c.arm = ManipulatorParams::uniform_rods(5.0, 5.0, 1.0, 1.0, 9.81);

  Eigen::Matrix2d m_imp, b_imp, k_imp;
  m_imp << 5, 1, 1, -3;
  b_imp << 20, 0, 5, 15;
  k_imp << 1.0, 0.5, 0, 0;
  c.impedance = {MatrixSchedule::constant(m_imp), MatrixSchedule::constant(b_imp),
                 MatrixSchedule::constant(k_imp)};

  const Eigen::Matrix2d identity = Eigen::Matrix2d::Identity();
  c.human = {MatrixSchedule::constant(10.0 * identity),
             MatrixSchedule::constant(2.0 * identity),
             MatrixSchedule::constant(identity)};

  c.cost = {MatrixSchedule::constant(Eigen::MatrixXd::Identity(6, 6)),
            MatrixSchedule::constant(Eigen::MatrixXd::Identity(2, 2)),
            MatrixSchedule::constant(Eigen::MatrixXd::Zero(6, 2))};

  c.initial.position << -0.5, 1.0;
  c.target.position << 0.8, -0.6;

  c.gains.zeta = 0.1;
  c.gains.k_rc = 50.0;
  c.gains.alpha = 10.0;
  c.gains.sigma = 0.1;
  c.gains.gamma = Eigen::MatrixXd::Identity(20, 20);
  c.rbf.nodes = 20;
  c.bind_horizon();
  return c;
}

void ScenarioConfig::bind_horizon() {
  for (MatrixSchedule* s :
       {&impedance.mass, &impedance.damping, &impedance.stiffness, &human.damping,
        &human.stiffness, &human.control_gain, &cost.q, &cost.r, &cost.s}) {
    s->set_horizon(t0, tf);
  }
}

void ScenarioConfig::validate() {
  try {
    arm.validate();
  } catch (const DomainError& e) {
    throw ConfigError("manipulator", e.what());
  }

  if (!std::isfinite(t0)) throw ConfigError("horizon.t0", "must be finite");
  if (!std::isfinite(tf) || !(tf > t0)) throw ConfigError("horizon.tf", "must exceed t0");
  int intervals = 0;
  try {
    intervals = grid_intervals(t0, tf, optimize_step);
  } catch (const DomainError& e) {
    throw ConfigError("integrator.optimize_step", e.what());
  }
  if (intervals <= kDefaultGuardSteps) {
    throw ConfigError("integrator.optimize_step",
                      "horizon must span more than the terminal guard window");
  }
  require_positive(tracking.step, "integrator.track_step");
  const double ratio = optimize_step / tracking.step;
  if (std::round(ratio) < 1.0 ||
      std::abs(ratio - std::round(ratio)) > 1e-9 * std::max(1.0, ratio)) {
    throw ConfigError("integrator.track_step",
                      "must equal optimize_step divided by a positive integer");
  }

  bind_horizon();
  require_shape(impedance.mass, 2, 2, "impedance.mass");
  require_shape(impedance.damping, 2, 2, "impedance.damping");
  require_shape(impedance.stiffness, 2, 2, "impedance.stiffness");
  require_shape(human.damping, 2, 2, "human.damping");
  require_shape(human.stiffness, 2, 2, "human.stiffness");
  require_shape(human.control_gain, 2, 2, "human.control_gain");
  require_shape(cost.q, 6, 6, "cost.Q");
  require_shape(cost.r, 2, 2, "cost.R");
  require_shape(cost.s, 6, 2, "cost.S");

  require_invertible(impedance.mass, t0, tf, "impedance.mass");
  require_invertible(human.damping, t0, tf, "human.damping");
  for (const auto& [s, key] :
       {std::pair{&impedance.damping, "impedance.damping"},
        std::pair{&impedance.stiffness, "impedance.stiffness"},
        std::pair{&human.stiffness, "human.stiffness"},
        std::pair{&human.control_gain, "human.control_gain"},
        std::pair{&cost.s, "cost.S"}}) {
    for_each_sample(t0, tf, [&, s = s, key = key](double t) {
      if (!sample(*s, t, key).allFinite()) throw ConfigError(key, "not finite" + at_time(t));
    });
  }
  require_symmetric_definite(cost.q, t0, tf, false, "cost.Q");
  require_symmetric_definite(cost.r, t0, tf, true, "cost.R");

  require_finite(initial.position, "boundary.initial.position");
  require_finite(initial.velocity, "boundary.initial.velocity");
  require_finite(initial.force, "boundary.initial.force");
  require_finite(target.position, "boundary.final.position");
  require_finite(target.velocity, "boundary.final.velocity");
  require_finite(target.force, "boundary.final.force");

  require_positive(gains.zeta, "controller.zeta");
  require_positive(gains.k_rc, "controller.k_rc");
  require_positive(gains.alpha, "controller.alpha");
  require_positive(gains.sigma, "controller.sigma");
  if (rbf.nodes < 1) throw ConfigError("rbf.nodes", "must be at least 1");
  if (gains.gamma.size() == 0) {
    gains.gamma = Eigen::MatrixXd::Identity(rbf.nodes, rbf.nodes);
  }
  try {
    gains.validate(rbf.nodes);
  } catch (const DomainError& e) {
    throw ConfigError("controller.gamma", e.what());
  }
  require_positive(rbf.width, "rbf.width");
  require_positive(rbf.error_scale, "rbf.input_scale");
  require_positive(rbf.rate_scale, "rbf.input_scale");
  require_positive(rbf.commutative_scale, "rbf.input_scale");

  require_finite(tracking.initial_offset, "controller.initial_offset");
  if (!(tracking.settle_time >= 0.0) || !std::isfinite(tracking.settle_time)) {
    throw ConfigError("controller.settle_time", "must be non-negative");
  }
  require_positive(tracking.final_window, "controller.final_window");
}

bool operator==(const ScenarioConfig& a, const ScenarioConfig& b) {
  return a.arm == b.arm && a.impedance.mass == b.impedance.mass &&
         a.impedance.damping == b.impedance.damping &&
         a.impedance.stiffness == b.impedance.stiffness &&
         a.human.damping == b.human.damping &&
         a.human.stiffness == b.human.stiffness &&
         a.human.control_gain == b.human.control_gain && a.cost.q == b.cost.q &&
         a.cost.r == b.cost.r && a.cost.s == b.cost.s && a.initial == b.initial &&
         a.target == b.target && a.t0 == b.t0 && a.tf == b.tf &&
         a.optimize_step == b.optimize_step && a.gains.zeta == b.gains.zeta &&
         a.gains.k_rc == b.gains.k_rc && a.gains.alpha == b.gains.alpha &&
         a.gains.sigma == b.gains.sigma &&
         same_matrix(a.gains.gamma, b.gains.gamma) && a.rbf == b.rbf &&
         a.tracking == b.tracking && a.emit_plots == b.emit_plots;
}

}  // namespace hrc
