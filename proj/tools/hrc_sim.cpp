// Command-line driver for the human-robot collaboration simulator.
//
//   hrc_sim run      --config <path> --out <dir> [--step <h>] [--seed <n>] [--emit-plots]
//   hrc_sim optimize --config <path> --out <dir> [--step <h>]
//   hrc_sim track    --config <path> --reference <reference.csv> --out <dir>
//                    [--phase1 <phase1_state.csv>] [--seed <n>]
//   hrc_sim verify   --suite <manipulator|riccati|controller|all> [--cases N] [--seed n]
//   hrc_sim oracle   --problem <lq.json> [--intervals N] [--out <dir>]
//
// Exit codes: 0 success, 1 verification failure or unexpected error,
// 2 config error, 3 numerical failure (divergence, singularity, unreachable
// target), 4 I/O error.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "hrc/config_io.hpp"
#include "hrc/errors.hpp"
#include "hrc/report_io.hpp"
#include "hrc/simulation.hpp"
#include "hrc/transcription.hpp"
#include "hrc/verification.hpp"

namespace {

using namespace hrc;

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kConfig:
      return 2;
    case ErrorKind::kNumerical:
    case ErrorKind::kSingular:
    case ErrorKind::kUnreachable:
      return 3;
    case ErrorKind::kIo:
      return 4;
    case ErrorKind::kDomain:
      return 1;
  }
  return 1;
}

struct ScenarioFlags {
  std::string config;
  std::string out;
  std::optional<double> step;
  std::optional<std::uint64_t> seed;
};

ScenarioConfig resolve(const ScenarioFlags& flags) {
  ScenarioConfig c = load_config(flags.config);
  if (flags.step) {
    c.optimize_step = *flags.step;
    c.tracking.step = *flags.step;
  }
  if (flags.seed) c.rbf.seed = *flags.seed;
  c.validate();
  return c;
}

void print_metrics(const Metrics& metrics) {
  for (const auto& [key, value] : metrics) {
    std::cout << key << " = " << format_double(value) << '\n';
  }
}

void finish(const SimulationReport& report, const std::string& out, bool plots) {
  const OutputBundle bundle = write_timeseries(report, out);
  if (plots) {
    for (int figure = 1; figure <= 6; ++figure) emit_plot_script(bundle.directory, figure);
  }
  print_metrics(report.metrics);
  std::cout << "wrote " << bundle.directory.string() << '\n';
}

int cmd_run(const ScenarioFlags& flags, bool emit_plots) {
  const ScenarioConfig c = resolve(flags);
  const SimulationReport report = run_scenario(c);
  finish(report, flags.out, emit_plots || c.emit_plots);
  return 0;
}

int cmd_optimize(const ScenarioFlags& flags) {
  SimulationReport report;
  report.config = resolve(flags);
  report.phase1 = phase1_optimize(report.config);
  report.metrics = compute_metrics(report.config, report.phase1, report.tracking);
  finish(report, flags.out, false);
  return 0;
}

int cmd_track(const ScenarioFlags& flags, const std::string& reference,
              const std::string& phase1) {
  SimulationReport report;
  report.config = resolve(flags);
  report.reference = read_reference(reference, phase1);
  report.tracking = phase2_track(report.config, report.reference);
  report.metrics = compute_metrics(report.config, report.phase1, report.tracking);
  finish(report, flags.out, false);
  return 0;
}

int cmd_verify(const std::string& suite, int cases, std::uint64_t seed) {
  const VerificationReport report = run_verification(suite, cases, seed);
  for (const CheckResult& c : report.checks) {
    std::printf("%-4s %-12s %-34s cases=%-5d worst=%-12.3e tol=%.1e\n",
                c.passed ? "PASS" : "FAIL", c.suite.c_str(), c.name.c_str(), c.cases,
                c.worst, c.tolerance);
  }
  return report.passed() ? 0 : 1;
}

int cmd_oracle(const std::string& problem_path, int intervals, const std::string& out) {
  const LQProblem problem = parse_lq_problem(read_text_file(problem_path));
  const TranscriptionResult result = transcription_oracle(problem, intervals);
  std::cout << "cost = " << format_double(result.cost) << '\n';
  if (out.empty()) return 0;

  std::error_code ec;
  std::filesystem::create_directories(out, ec);
  if (ec) throw IoError(out, "cannot create directory: " + ec.message());
  std::string text = "t";
  for (Eigen::Index i = 0; i < problem.state_dim(); ++i) text += ",x" + std::to_string(i + 1);
  for (Eigen::Index i = 0; i < problem.input_dim(); ++i) text += ",u" + std::to_string(i + 1);
  text += '\n';
  for (std::size_t k = 0; k < result.times.size(); ++k) {
    text += format_double(result.times[k]);
    for (double v : result.states[k]) text += "," + format_double(v);
    for (double v : result.controls[k]) text += "," + format_double(v);
    text += '\n';
  }
  const std::filesystem::path path = std::filesystem::path(out) / "oracle.csv";
  write_text_file(path, text);
  std::cout << "wrote " << path.string() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Human-robot collaboration: optimal trajectory planning and adaptive tracking"};
  app.require_subcommand(1);

  ScenarioFlags flags;
  bool emit_plots = false;
  auto add_scenario = [&](CLI::App* sub, bool with_step, bool with_seed) {
    sub->add_option("--config", flags.config, "Scenario JSON file")->required();
    sub->add_option("--out", flags.out, "Output directory")->required();
    if (with_step) {
      sub->add_option("--step", flags.step, "Integration step for both phases [s]")
          ->check(CLI::PositiveNumber);
    }
    if (with_seed) sub->add_option("--seed", flags.seed, "RBF center seed");
  };

  CLI::App* run = app.add_subcommand("run", "Optimize the trajectory, then track it");
  add_scenario(run, true, true);
  run->add_flag("--emit-plots", emit_plots, "Also write plotting scripts fig1..fig6.py");

  CLI::App* optimize = app.add_subcommand("optimize", "Trajectory optimization only");
  add_scenario(optimize, true, false);

  CLI::App* track = app.add_subcommand("track", "Track a joint reference read from CSV");
  add_scenario(track, false, true);
  std::string reference, phase1;
  track->add_option("--reference", reference, "reference.csv from a previous run")
      ->required();
  track->add_option("--phase1", phase1, "phase1_state.csv supplying the human force");

  CLI::App* verify = app.add_subcommand("verify", "Randomized property and oracle suites");
  std::string suite = "all";
  int cases = 1000;
  std::uint64_t seed = 1;
  verify->add_option("--suite", suite, "Suite to run")
      ->check(CLI::IsMember({"manipulator", "riccati", "controller", "all"}));
  verify->add_option("--cases", cases, "Random cases per check")->check(CLI::PositiveNumber);
  verify->add_option("--seed", seed, "Random seed");

  CLI::App* oracle = app.add_subcommand("oracle", "Direct transcription of an LQ problem");
  std::string problem, oracle_out;
  int intervals = 200;
  oracle->add_option("--problem", problem, "LQ problem JSON file")->required();
  oracle->add_option("--intervals", intervals, "Collocation intervals")
      ->check(CLI::Range(2, 100000));
  oracle->add_option("--out", oracle_out, "Directory for oracle.csv");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(flags, emit_plots);
    if (*optimize) return cmd_optimize(flags);
    if (*track) return cmd_track(flags, reference, phase1);
    if (*verify) return cmd_verify(suite, cases, seed);
    if (*oracle) return cmd_oracle(problem, intervals, oracle_out);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
