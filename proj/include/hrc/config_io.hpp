#pragma once

// JSON scenario files. Sections mirror ScenarioConfig; matrices are
// row-major nested lists. Unknown keys are rejected, optional keys take the
// defaults of ScenarioConfig, and every error names the offending key.
//
//   {
//     "manipulator": {"m1": 5, "m2": 5, "l1": 1, "l2": 1, "g": 9.81},
//     "impedance":   {"mass": [[5, 1], [1, -3]], "damping": ..., "stiffness": ...},
//     "human":       {"damping": ..., "stiffness": ..., "control_gain": ...},
//     "cost":        {"Q": ..., "R": ..., "S": ...},
//     "boundary":    {"initial": {"position": [-0.5, 1]}, "final": {"position": [0.8, -0.6]}},
//     "horizon":     {"t0": 0, "tf": 10},
//     "integrator":  {"optimize_step": 0.001, "track_step": 0.001},
//     "controller":  {"zeta": 0.1, "k_rc": 50, "alpha": 10, "sigma": 0.1, "gamma": 1},
//     "rbf":         {"nodes": 20, "seed": 1, "width": 1, "input_scale": [1, 1, 1]},
//     "output":      {"emit_plots": false}
//   }
//
// A schedule is either a matrix (constant) or an object
// {"kind": "constant" | "sinusoidal" | "tabulated", ...}.

#include <filesystem>
#include <string>
#include <string_view>

#include "hrc/riccati.hpp"
#include "hrc/scenario.hpp"

namespace hrc {

/// Parses and validates. Throws ConfigError.
ScenarioConfig parse_config(std::string_view text);

/// Inverse of parse_config; parse_config(serialize_config(c)) == c.
std::string serialize_config(const ScenarioConfig& config);

/// Reads and parses a file. Throws IoError or ConfigError.
ScenarioConfig load_config(const std::filesystem::path& path);

/// Time-invariant LQ problem for the transcription oracle:
/// {"A", "B", "Q", "R", "S"?, "t0"?, "tf", "x0", "xf"}.
LQProblem parse_lq_problem(std::string_view text);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace hrc
