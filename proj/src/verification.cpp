#include "hrc/verification.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "hrc/errors.hpp"
#include "hrc/integrator.hpp"
#include "hrc/manipulator.hpp"
#include "hrc/random.hpp"
#include "hrc/tracking_controller.hpp"
#include "hrc/transcription.hpp"

namespace hrc {
namespace {

constexpr double kPi = 3.14159265358979323846;
// Each oracle comparison is a dense KKT solve; more cases than this only
// repeat the same check at a higher cost.
constexpr int kMaxOracleProblems = 20;

Eigen::MatrixXd random_matrix(UniformSampler& rng, Eigen::Index rows, Eigen::Index cols,
                              double lo = -1.0, double hi = 1.0) {
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = rng.uniform(lo, hi);
  }
  return m;
}

JointState random_joint_state(UniformSampler& rng) {
  JointState s;
  s.q = {rng.uniform(-kPi, kPi), rng.uniform(-kPi, kPi)};
  s.qdot = {rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)};
  return s;
}

CheckResult check(const std::string& suite, const std::string& name, int cases,
                  double tolerance, const std::function<double(int)>& violation) {
  CheckResult r{suite, name, cases, 0.0, tolerance, true};
  for (int k = 0; k < cases; ++k) {
    const double v = violation(k);
    r.worst = std::isnan(v) || std::isnan(r.worst) ? std::nan("") : std::max(r.worst, v);
  }
  r.passed = !std::isnan(r.worst) && r.worst <= tolerance;
  return r;
}

void manipulator_suite(VerificationReport& out, int cases, std::uint64_t seed) {
  const ManipulatorParams arm;
  UniformSampler rng(seed);
  const std::string suite = "manipulator";

  out.checks.push_back(check(suite, "joint_skew_symmetry", cases, 1e-10, [&](int) {
    const JointState s = random_joint_state(rng);
    const Eigen::Vector2d lambda = random_matrix(rng, 2, 1);
    const Eigen::Matrix2d n =
        mass_matrix_derivative(arm, s) - 2.0 * joint_dynamics_terms(arm, s).coriolis;
    return std::abs(lambda.dot(n * lambda));
  }));

  out.checks.push_back(check(suite, "cartesian_skew_symmetry", cases, 1e-6, [&](int) {
    JointState s = random_joint_state(rng);
    while (std::abs(jacobian(arm, s.q).determinant()) < 0.1) s = random_joint_state(rng);
    const Eigen::Vector2d lambda = random_matrix(rng, 2, 1);
    // Five-point stencil along qdot; M_c grows like 1/det(J)^2, so a plain
    // central difference is too coarse near the excluded region.
    const double h = 3e-5;
    auto mass_at = [&](double offset) {
      JointState shifted = s;
      shifted.q += offset * s.qdot;
      return Eigen::Matrix2d(cartesian_dynamics_terms(arm, shifted).mass);
    };
    const Eigen::Matrix2d mdot =
        (mass_at(-2 * h) - 8.0 * mass_at(-h) + 8.0 * mass_at(h) - mass_at(2 * h)) / (12.0 * h);
    const Eigen::Matrix2d n = mdot - 2.0 * cartesian_dynamics_terms(arm, s).coriolis;
    return std::abs(lambda.dot(n * lambda));
  }));

  out.checks.push_back(check(suite, "mass_matrix_positive_definite", cases, 0.0, [&](int) {
    const JointState s = random_joint_state(rng);
    const Eigen::Matrix2d m = joint_dynamics_terms(arm, s).mass;
    const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
    const double lowest = Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(m).eigenvalues()(0);
    return asym + (lowest > 0.0 ? 0.0 : 1.0);
  }));

  for (const auto& [branch, name] : {std::pair{ElbowBranch::kDown, "fk_ik_roundtrip_elbow_down"},
                                     std::pair{ElbowBranch::kUp, "fk_ik_roundtrip_elbow_up"}}) {
    out.checks.push_back(check(suite, name, cases, 1e-9, [&, branch = branch](int) {
      const double reach = arm.l1 + arm.l2;
      const double inner = std::abs(arm.l1 - arm.l2);
      const double r = rng.uniform(inner + 1e-3 * reach, reach * (1.0 - 1e-6));
      const double a = rng.uniform(-kPi, kPi);
      const Eigen::Vector2d x(r * std::cos(a), r * std::sin(a));
      const Eigen::Vector2d q = inverse_kinematics(arm, x, branch);
      const bool on_branch = branch == ElbowBranch::kDown ? q(1) <= 0.0 : q(1) >= 0.0;
      return (forward_kinematics(arm, q) - x).norm() + (on_branch ? 0.0 : 1.0);
    }));
  }
}

void riccati_suite(VerificationReport& out, int cases, std::uint64_t seed) {
  const std::string suite = "riccati";

  out.checks.push_back(check(suite, "scalar_analytic", 1, 1e-12, [&](int) {
    const Eigen::MatrixXd one = Eigen::MatrixXd::Ones(1, 1);
    const LQProblem p = LQProblem::time_invariant(
        Eigen::MatrixXd::Zero(1, 1), one, Eigen::MatrixXd::Zero(1, 1),
        Eigen::MatrixXd::Zero(1, 1), one, 0.0, 1.0, Eigen::VectorXd::Zero(1), one);
    const RiccatiSolution sol = solve_riccati_backward(p, 1e-3);
    double worst = 0.0;
    for (int k = 0; k <= sol.intervals(); ++k) {
      worst = std::max(worst, std::abs(sol.p(k)(0, 0) - (1.0 - sol.time(k))));
    }
    return worst;
  }));

  UniformSampler rng(seed);
  double worst_asym = 0.0;
  const int problems = std::min(cases, kMaxOracleProblems);
  out.checks.push_back(check(suite, "rollout_vs_transcription_cost", problems, 1e-2, [&](int) {
    // At least n/2 inputs and a 2 s horizon keep the draws well controllable;
    // single-input 4-state draws over 1 s need costs near 1e6.
    const int n = 2 + static_cast<int>(rng.next() * 3.0);
    const int m = (n + 1) / 2;
    const auto problem_seed = static_cast<std::uint64_t>(rng.next() * 0x1.0p53);
    const LQProblem p = random_lq_problem(problem_seed, n, m, 2.0);
    const RiccatiSolution sol = solve_riccati_backward(p, 1e-3);
    for (int k = 0; k <= sol.intervals(); ++k) {
      const Eigen::MatrixXd& pk = sol.p(k);
      worst_asym = std::max(worst_asym, (pk - pk.transpose()).cwiseAbs().maxCoeff());
    }
    const double j_riccati = rollout(p, sol, sol.step()).cost;
    const double j_oracle = transcription_oracle(p, 100).cost;
    return std::abs(j_riccati - j_oracle) / std::max(std::abs(j_oracle), 1e-12);
  }));
  out.checks.push_back(
      CheckResult{suite, "p_symmetry", problems, worst_asym, 1e-8, worst_asym <= 1e-8});
}

void controller_suite(VerificationReport& out, int cases, std::uint64_t seed) {
  const std::string suite = "controller";
  UniformSampler rng(seed);
  const int nodes = 20;
  const RbfNetwork net = RbfNetwork::seeded(nodes, seed);

  out.checks.push_back(check(suite, "leakage_decay", std::max(1, cases / 100), 1e-6, [&](int) {
    ControllerGains gains;
    gains.sigma = rng.uniform(0.05, 1.0);
    const Eigen::MatrixXd l = random_matrix(rng, nodes, nodes);
    gains.gamma = Eigen::MatrixXd::Identity(nodes, nodes) + l * l.transpose() / nodes;
    const Eigen::VectorXd theta0 = random_matrix(rng, nodes, 1, 0.0, 2.0);
    const Eigen::Vector2d zero = Eigen::Vector2d::Zero();
    const Eigen::VectorXd z = network_input(zero, zero, zero);
    auto f = [&](double, const Eigen::VectorXd& th) {
      return adapt(net, th, zero, z, gains);
    };
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gains.gamma);
    Eigen::VectorXd theta = theta0;
    const double h = 1e-3;
    double worst = 0.0;
    for (int k = 1; k <= 2000; ++k) {
      theta = rk4_step(f, (k - 1) * h, theta, h);
      const Eigen::VectorXd decay = (-gains.sigma * k * h * eig.eigenvalues()).array().exp();
      const Eigen::VectorXd exact =
          eig.eigenvectors() * decay.asDiagonal() * eig.eigenvectors().transpose() * theta0;
      worst = std::max(worst, (theta - exact).cwiseAbs().maxCoeff());
    }
    return worst;
  }));

  out.checks.push_back(check(suite, "features_in_unit_interval", cases, 0.0, [&](int) {
    const Eigen::VectorXd z = random_matrix(rng, RbfNetwork::kInputDim, 1, -5.0, 5.0);
    const Eigen::VectorXd phi = net.features(z);
    return (phi.array() > 0.0 && phi.array() <= 1.0).all() ? 0.0 : 1.0;
  }));

  out.checks.push_back(check(suite, "adaptation_drives_theta_up", cases, 0.0, [&](int) {
    ControllerGains gains;
    const Eigen::Vector2d e_c = random_matrix(rng, 2, 1);
    const Eigen::VectorXd z = random_matrix(rng, RbfNetwork::kInputDim, 1);
    const Eigen::VectorXd dot = adapt(net, Eigen::VectorXd::Zero(nodes), e_c, z, gains);
    return dot.minCoeff() >= 0.0 ? 0.0 : -dot.minCoeff();
  }));

  out.checks.push_back(check(suite, "torque_along_commutative_error", cases, 1e-12, [&](int) {
    ControllerGains gains;
    const Eigen::Vector2d e = random_matrix(rng, 2, 1);
    const Eigen::Vector2d e_dot = random_matrix(rng, 2, 1);
    const Eigen::Vector2d e_int = random_matrix(rng, 2, 1);
    const Eigen::VectorXd theta = random_matrix(rng, nodes, 1, 0.0, 1.0);
    const ControlOutput u = evaluate_controller(net, gains, e, e_dot, e_int, theta);
    const Eigen::Vector2d expected_ec =
        2.0 * gains.zeta * e + gains.zeta * gains.zeta * e_int + e_dot;
    return (u.e_c - expected_ec).norm() +
           (u.tau - (gains.k_rc + u.k_r) * u.e_c).norm() /
               std::max(1.0, u.tau.norm()) +
           (u.k_r >= 0.0 ? 0.0 : 1.0);
  }));
}

}  // namespace

bool VerificationReport::passed() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const CheckResult& c) { return c.passed; });
}

LQProblem random_lq_problem(std::uint64_t seed, int n, int m, double tf) {
  UniformSampler rng(seed);
  const Eigen::MatrixXd a = random_matrix(rng, n, n);
  Eigen::MatrixXd b = random_matrix(rng, n, m);
  while (Eigen::FullPivLU<Eigen::MatrixXd>(b).rank() < m) b = random_matrix(rng, n, m);
  const Eigen::MatrixXd l = random_matrix(rng, n, n);
  const Eigen::MatrixXd d = random_matrix(rng, m, m);
  const Eigen::MatrixXd q = l * l.transpose() / n;
  const Eigen::MatrixXd r = Eigen::MatrixXd::Identity(m, m) + d * d.transpose() / m;
  const Eigen::VectorXd x0 = random_matrix(rng, n, 1);
  const Eigen::VectorXd xf = random_matrix(rng, n, 1);
  return LQProblem::time_invariant(a, b, q, Eigen::MatrixXd::Zero(n, m), r, 0.0, tf, x0, xf);
}

VerificationReport run_verification(const std::string& suite, int cases,
                                    std::uint64_t seed) {
  if (cases < 1) throw DomainError("cases must be at least 1");
  VerificationReport out;
  const bool all = suite == "all";
  if (!all && suite != "manipulator" && suite != "riccati" && suite != "controller") {
    throw DomainError("unknown suite '" + suite +
                      "' (expected manipulator, riccati, controller or all)");
  }
  if (all || suite == "manipulator") manipulator_suite(out, cases, seed);
  if (all || suite == "riccati") riccati_suite(out, cases, seed);
  if (all || suite == "controller") controller_suite(out, cases, seed);
  return out;
}

}  // namespace hrc
