#include "hrc/interaction_model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hrc/errors.hpp"

namespace hrc {
namespace {

constexpr double kHorizonSlack = 1e-9;

bool same_matrix(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() && a == b;
}

void require_shape(const MatrixSchedule& s, Eigen::Index rows, Eigen::Index cols,
                   const char* name) {
  if (s.rows() != rows || s.cols() != cols) {
    std::ostringstream msg;
    msg << name << " must be " << rows << "x" << cols << ", got " << s.rows()
        << "x" << s.cols();
    throw DomainError(msg.str());
  }
}

}  // namespace

MatrixSchedule MatrixSchedule::constant(Eigen::MatrixXd base) {
  MatrixSchedule s;
  s.kind_ = Kind::kConstant;
  s.base_ = std::move(base);
  return s;
}

MatrixSchedule MatrixSchedule::sinusoidal(Eigen::MatrixXd base,
                                          Eigen::MatrixXd amplitude,
                                          double frequency) {
  if (base.rows() != amplitude.rows() || base.cols() != amplitude.cols()) {
    throw DomainError("sinusoidal schedule: amplitude shape differs from base");
  }
  if (!std::isfinite(frequency)) {
    throw DomainError("sinusoidal schedule: frequency is not finite");
  }
  MatrixSchedule s;
  s.kind_ = Kind::kSinusoidal;
  s.base_ = std::move(base);
  s.amplitude_ = std::move(amplitude);
  s.frequency_ = frequency;
  return s;
}

MatrixSchedule MatrixSchedule::tabulated(std::vector<double> times,
                                         std::vector<Eigen::MatrixXd> values) {
  if (times.size() < 2 || times.size() != values.size()) {
    throw DomainError(
        "tabulated schedule needs at least two samples and one value per time");
  }
  for (std::size_t k = 1; k < times.size(); ++k) {
    if (!(times[k] > times[k - 1])) {
      throw DomainError("tabulated schedule times must be strictly increasing");
    }
    if (values[k].rows() != values[0].rows() ||
        values[k].cols() != values[0].cols()) {
      throw DomainError("tabulated schedule values must share one shape");
    }
  }
  MatrixSchedule s;
  s.kind_ = Kind::kTabulated;
  s.times_ = std::move(times);
  s.values_ = std::move(values);
  return s;
}

MatrixSchedule& MatrixSchedule::set_horizon(double t_begin, double t_end) {
  t_begin_ = t_begin;
  t_end_ = t_end;
  return *this;
}

Eigen::Index MatrixSchedule::rows() const {
  return kind_ == Kind::kTabulated ? values_.front().rows() : base_.rows();
}

Eigen::Index MatrixSchedule::cols() const {
  return kind_ == Kind::kTabulated ? values_.front().cols() : base_.cols();
}

Eigen::MatrixXd MatrixSchedule::evaluate(double t) const {
  if (!(t >= t_begin_ - kHorizonSlack && t <= t_end_ + kHorizonSlack)) {
    std::ostringstream msg;
    msg << "schedule evaluated at t = " << t << " outside horizon [" << t_begin_
        << ", " << t_end_ << "]";
    throw DomainError(msg.str());
  }
  switch (kind_) {
    case Kind::kConstant:
      return base_;
    case Kind::kSinusoidal:
      return base_ + amplitude_ * std::sin(frequency_ * t);
    case Kind::kTabulated: {
      if (t < times_.front() - kHorizonSlack || t > times_.back() + kHorizonSlack) {
        std::ostringstream msg;
        msg << "tabulated schedule evaluated at t = " << t << " outside table ["
            << times_.front() << ", " << times_.back() << "]";
        throw DomainError(msg.str());
      }
      const auto upper = std::upper_bound(times_.begin(), times_.end(), t);
      std::size_t k = static_cast<std::size_t>(upper - times_.begin());
      k = std::clamp<std::size_t>(k, 1, times_.size() - 1);
      const double w = std::clamp(
          (t - times_[k - 1]) / (times_[k] - times_[k - 1]), 0.0, 1.0);
      return (1.0 - w) * values_[k - 1] + w * values_[k];
    }
  }
  return base_;
}

MatrixSchedule MatrixSchedule::scaled(double factor) const {
  MatrixSchedule s = *this;
  s.base_ *= factor;
  s.amplitude_ *= factor;
  for (auto& v : s.values_) v *= factor;
  return s;
}

bool operator==(const MatrixSchedule& a, const MatrixSchedule& b) {
  if (a.kind_ != b.kind_ || a.frequency_ != b.frequency_ ||
      a.times_ != b.times_ || a.values_.size() != b.values_.size() ||
      a.t_begin_ != b.t_begin_ || a.t_end_ != b.t_end_) {
    return false;
  }
  for (std::size_t k = 0; k < a.values_.size(); ++k) {
    if (!same_matrix(a.values_[k], b.values_[k])) return false;
  }
  return same_matrix(a.base_, b.base_) && same_matrix(a.amplitude_, b.amplitude_);
}

ImpedanceMatrices impedance_state_matrices(const ImpedanceParams& imp, double t) {
  const Eigen::Matrix2d mass = imp.mass.evaluate(t);
  const Eigen::Matrix2d damping = imp.damping.evaluate(t);
  const Eigen::Matrix2d stiffness = imp.stiffness.evaluate(t);
  if (!(std::abs(mass.determinant()) > kInvertibilityThreshold)) {
    std::ostringstream msg;
    msg << "impedance mass matrix is singular at t = " << t;
    throw SingularityError(msg.str());
  }
  const Eigen::Matrix2d mass_inv = mass.inverse();

  ImpedanceMatrices out;
  out.a.setZero();
  out.a.topRightCorner<2, 2>().setIdentity();
  out.a.bottomLeftCorner<2, 2>() = -mass_inv * stiffness;
  out.a.bottomRightCorner<2, 2>() = -mass_inv * damping;
  out.b.setZero();
  out.b.bottomRows<2>().setIdentity();
  return out;
}

HumanForceMatrices human_force_matrices(const HumanParams& human, double t) {
  const Eigen::Matrix2d damping = human.damping.evaluate(t);
  const Eigen::Matrix2d stiffness = human.stiffness.evaluate(t);
  const Eigen::Matrix2d gain = human.control_gain.evaluate(t);
  if (!(std::abs(damping.determinant()) > kInvertibilityThreshold)) {
    std::ostringstream msg;
    msg << "human damping matrix K_d is singular at t = " << t;
    throw SingularityError(msg.str());
  }
  const Eigen::Matrix2d damping_inv = damping.inverse();

  HumanForceMatrices out;
  out.a.setZero();
  out.a.leftCols<2>() = gain * damping_inv;
  out.b = -damping_inv * stiffness;
  return out;
}

UnifiedMatrices unified_matrices(const ImpedanceParams& imp,
                                 const HumanParams& human, double t) {
  const ImpedanceMatrices xi = impedance_state_matrices(imp, t);
  const HumanForceMatrices h = human_force_matrices(human, t);
  UnifiedMatrices out;
  out.a.setZero();
  out.a.topLeftCorner<4, 4>() = xi.a;
  out.a.bottomLeftCorner<2, 4>() = h.a;
  out.a.bottomRightCorner<2, 2>() = h.b;
  out.b.setZero();
  out.b.topRows<4>() = xi.b;
  return out;
}

void validate_interaction_models(const ImpedanceParams& imp,
                                 const HumanParams& human, double t0, double tf,
                                 int samples) {
  require_shape(imp.mass, 2, 2, "impedance mass");
  require_shape(imp.damping, 2, 2, "impedance damping");
  require_shape(imp.stiffness, 2, 2, "impedance stiffness");
  require_shape(human.damping, 2, 2, "human damping");
  require_shape(human.stiffness, 2, 2, "human stiffness");
  require_shape(human.control_gain, 2, 2, "human control gain");
  const int n = std::max(samples, 2);
  double prev_mass_det = 0.0, prev_damping_det = 0.0;
  for (int k = 0; k < n; ++k) {
    const double t = t0 + (tf - t0) * static_cast<double>(k) / (n - 1);
    const UnifiedMatrices m = unified_matrices(imp, human, t);
    // A determinant changing sign between samples passed through zero.
    const double mass_det = imp.mass.evaluate(t).determinant();
    const double damping_det = human.damping.evaluate(t).determinant();
    if (k > 0 && (mass_det * prev_mass_det < 0.0 || damping_det * prev_damping_det < 0.0)) {
      std::ostringstream msg;
      msg << (mass_det * prev_mass_det < 0.0 ? "impedance mass" : "human damping")
          << " becomes singular before t = " << t;
      throw SingularityError(msg.str());
    }
    prev_mass_det = mass_det;
    prev_damping_det = damping_det;
    if (!m.a.allFinite()) {
      std::ostringstream msg;
      msg << "unified system matrix is not finite at t = " << t;
      throw DomainError(msg.str());
    }
  }
}

}  // namespace hrc
