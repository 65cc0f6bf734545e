#pragma once

// Time-varying impedance and human-force models and their assembly into the
// unified collaboration state space
//
//   X = [x_imp; xdot_imp; f_h],   Xdot = A(t) X + B(t) u.

#include <limits>
#include <vector>

#include <Eigen/Dense>

namespace hrc {

/// Matrix-valued function of time. Constant, sinusoidal
/// (base + amplitude * sin(frequency * t), elementwise) or tabulated with
/// linear interpolation. Evaluation outside the horizon is a DomainError.
class MatrixSchedule {
 public:
  enum class Kind { kConstant, kSinusoidal, kTabulated };

  MatrixSchedule() = default;

  static MatrixSchedule constant(Eigen::MatrixXd base);
  static MatrixSchedule sinusoidal(Eigen::MatrixXd base,
                                   Eigen::MatrixXd amplitude, double frequency);
  /// times strictly increasing, at least two entries, one value per time.
  static MatrixSchedule tabulated(std::vector<double> times,
                                  std::vector<Eigen::MatrixXd> values);

  Eigen::MatrixXd evaluate(double t) const;

  /// Restricts evaluation to [t_begin, t_end] (1e-9 slack). Unbounded by default.
  MatrixSchedule& set_horizon(double t_begin, double t_end);

  Kind kind() const { return kind_; }
  Eigen::Index rows() const;
  Eigen::Index cols() const;
  const Eigen::MatrixXd& base() const { return base_; }
  const Eigen::MatrixXd& amplitude() const { return amplitude_; }
  double frequency() const { return frequency_; }
  const std::vector<double>& times() const { return times_; }
  const std::vector<Eigen::MatrixXd>& values() const { return values_; }
  double horizon_begin() const { return t_begin_; }
  double horizon_end() const { return t_end_; }

  /// Every sample of the table is scaled (or base and amplitude).
  MatrixSchedule scaled(double factor) const;

  friend bool operator==(const MatrixSchedule& a, const MatrixSchedule& b);

 private:
  Kind kind_ = Kind::kConstant;
  Eigen::MatrixXd base_;
  Eigen::MatrixXd amplitude_;
  double frequency_ = 0.0;
  std::vector<double> times_;
  std::vector<Eigen::MatrixXd> values_;
  double t_begin_ = -std::numeric_limits<double>::infinity();
  double t_end_ = std::numeric_limits<double>::infinity();
};

/// M_imp xddot + B_imp xdot + K_imp x = f_h.
struct ImpedanceParams {
  MatrixSchedule mass;
  MatrixSchedule damping;
  MatrixSchedule stiffness;
};

/// K_d fdot_h + K_p f_h = k_e x_d.
struct HumanParams {
  MatrixSchedule damping;       // K_d
  MatrixSchedule stiffness;     // K_p
  MatrixSchedule control_gain;  // k_e
};

struct ImpedanceMatrices {
  Eigen::Matrix4d a;
  Eigen::Matrix<double, 4, 2> b;
};

struct HumanForceMatrices {
  Eigen::Matrix<double, 2, 4> a;
  Eigen::Matrix2d b;
};

using Matrix6d = Eigen::Matrix<double, 6, 6>;
using Vector6d = Eigen::Matrix<double, 6, 1>;
using Matrix62d = Eigen::Matrix<double, 6, 2>;

struct UnifiedMatrices {
  Matrix6d a;
  Matrix62d b;
};

inline constexpr double kInvertibilityThreshold = 1e-9;

/// A_xi = [[0, I], [-M^-1 K, -M^-1 B]], B_xi = [[0], [I]].
/// Throws SingularityError when |det M_imp(t)| <= 1e-9.
ImpedanceMatrices impedance_state_matrices(const ImpedanceParams& imp, double t);

/// A_h = k_e [K_d^-1, 0], B_h = -K_d^-1 K_p.
/// Throws SingularityError when |det K_d(t)| <= 1e-9.
HumanForceMatrices human_force_matrices(const HumanParams& human, double t);

/// A = [[A_xi, 0], [A_h, B_h]], B = [[B_xi], [0]], with the human's desired
/// trajectory identified with the impedance state.
UnifiedMatrices unified_matrices(const ImpedanceParams& imp,
                                 const HumanParams& human, double t);

/// Checks shapes and invertibility of M_imp and K_d at `samples` evenly
/// spaced times in [t0, tf], including a determinant sign change between
/// neighbouring samples. Throws SingularityError / DomainError.
void validate_interaction_models(const ImpedanceParams& imp,
                                 const HumanParams& human, double t0, double tf,
                                 int samples = 100);

}  // namespace hrc
