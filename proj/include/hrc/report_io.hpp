#pragma once

// CSV time series, resolved config and plot scripts for a simulation report.
//
//   phase1_state.csv  t,ximp1,ximp2,xdimp1,xdimp2,fh1,fh2,u1,u2
//   reference.csv     t,qd1,qd2,qdd1,qdd2        (qdd = desired joint velocity)
//   tracking.csv      t,q1,q2,qd1,qd2,e1,e2,ec1,ec2,tau1,tau2,kR
//   metrics.csv       key,value
//
// Numbers are written with 17 significant digits so reading them back gives
// the same doubles.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "hrc/simulation.hpp"

namespace hrc {

inline constexpr const char* kPhase1Header = "t,ximp1,ximp2,xdimp1,xdimp2,fh1,fh2,u1,u2";
inline constexpr const char* kReferenceHeader = "t,qd1,qd2,qdd1,qdd2";
inline constexpr const char* kTrackingHeader = "t,q1,q2,qd1,qd2,e1,e2,ec1,ec2,tau1,tau2,kR";
inline constexpr const char* kMetricsHeader = "key,value";

struct OutputBundle {
  std::filesystem::path directory;
  std::vector<std::filesystem::path> files;
};

/// 17 significant digits; parses back to exactly v.
std::string format_double(double v);
/// Throws DomainError on malformed input.
double parse_double(std::string_view text);

std::string phase1_csv(const Phase1Result& phase1);
std::string reference_csv(const ReferenceTrajectory& reference);
std::string tracking_csv(const TrackingRecord& tracking);
std::string metrics_csv(const Metrics& metrics);

/// Writes whichever parts of the report are populated (an empty series still
/// gets its header) plus config_resolved.json. Creates the directory.
/// Throws IoError naming the path.
OutputBundle write_timeseries(const SimulationReport& report,
                              const std::filesystem::path& dir);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  std::size_t column(const std::string& name) const;  // DomainError if absent
  std::vector<double> series(const std::string& name) const;
};

/// Numeric CSV (metrics.csv excepted). Throws IoError / DomainError.
CsvTable parse_csv(std::string_view text);
CsvTable read_csv(const std::filesystem::path& path);

/// Rebuilds a joint reference from reference.csv, and f_h from
/// phase1_state.csv when given (zero force otherwise). Both files must share
/// a uniform time grid.
ReferenceTrajectory read_reference(const std::filesystem::path& reference_csv_path,
                                   const std::filesystem::path& phase1_csv_path = {});

/// figure 1: XY path, 2: x and y vs t, 3: f_h vs t, 4/5: joint 1/2 tracking,
/// 6: e_c vs t. Writes figN.py next to the CSVs; DomainError for other numbers.
std::filesystem::path emit_plot_script(const std::filesystem::path& dir, int figure);

void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace hrc
