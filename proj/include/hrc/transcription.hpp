#pragma once

// Direct transcription of a fixed-endpoint LQ problem: trapezoidal
// collocation of the dynamics and the cost on a uniform grid, giving an
// equality-constrained QP whose KKT system is solved by dense LU. It shares
// no code path with the Riccati solver and serves as its independent check.

#include <vector>

#include <Eigen/Dense>

#include "hrc/riccati.hpp"

namespace hrc {

struct TranscriptionResult {
  double cost = 0.0;
  std::vector<double> times;
  std::vector<Eigen::VectorXd> states;
  std::vector<Eigen::VectorXd> controls;
};

/// Throws DomainError for intervals < 2 and SingularityError when the KKT
/// matrix is numerically singular (e.g. an uncontrollable discretization).
TranscriptionResult transcription_oracle(const LQProblem& problem, int intervals);

}  // namespace hrc
