#pragma once

// Randomized property and oracle suites behind `hrc_sim verify`.

#include <cstdint>
#include <string>
#include <vector>

#include "hrc/riccati.hpp"

namespace hrc {

struct CheckResult {
  std::string suite;
  std::string name;
  int cases = 0;
  double worst = 0.0;      // largest observed violation
  double tolerance = 0.0;
  bool passed = false;
};

struct VerificationReport {
  std::vector<CheckResult> checks;

  bool passed() const;
};

/// suite: manipulator, riccati, controller or all. DomainError otherwise.
/// The riccati suite compares against the transcription oracle on at most
/// 20 random problems.
VerificationReport run_verification(const std::string& suite, int cases,
                                    std::uint64_t seed);

/// Small random time-invariant LQ problem on [0, tf]: A entries in [-1, 1],
/// B of full column rank, Q = L L' / n, R = I + D D' / m, S = 0, and
/// boundary states in [-1, 1]^n.
LQProblem random_lq_problem(std::uint64_t seed, int state_dim, int input_dim,
                            double tf = 1.0);

}  // namespace hrc
