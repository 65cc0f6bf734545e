#include "hrc/report_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

#include "hrc/config_io.hpp"
#include "hrc/errors.hpp"

namespace hrc {
namespace {

class CsvWriter {
 public:
  explicit CsvWriter(const char* header) { out_ << header << '\n'; }

  CsvWriter& cell(double v) {
    sep();
    out_ << format_double(v);
    return *this;
  }
  CsvWriter& cell(const Eigen::VectorXd& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) cell(v(i));
    return *this;
  }
  CsvWriter& cell(std::string_view text) {
    sep();
    out_ << text;
    return *this;
  }
  void end_row() {
    out_ << '\n';
    first_ = true;
  }
  std::string str() const { return out_.str(); }

 private:
  void sep() {
    if (!first_) out_ << ',';
    first_ = false;
  }

  std::ostringstream out_;
  bool first_ = true;
};

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

std::vector<std::string_view> lines_of(std::string_view text) {
  std::vector<std::string_view> out;
  for (std::string_view line : split(text, '\n')) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty()) out.push_back(line);
  }
  return out;
}

const char* plot_body(int figure) {
  switch (figure) {
    case 1:
      return R"(d = load("phase1_state.csv")
plt.plot(d["ximp1"], d["ximp2"])
plt.plot(d["ximp1"][:1], d["ximp2"][:1], "o", label="start")
plt.plot(d["ximp1"][-1:], d["ximp2"][-1:], "s", label="target")
plt.xlabel("x [m]")
plt.ylabel("y [m]")
plt.axis("equal")
plt.legend()
plt.title("Cartesian path in the XY plane")
)";
    case 2:
      return R"(d = load("phase1_state.csv")
plt.plot(d["t"], d["ximp1"], label="x")
plt.plot(d["t"], d["ximp2"], label="y")
plt.xlabel("t [s]")
plt.ylabel("position [m]")
plt.legend()
plt.title("Cartesian position vs time")
)";
    case 3:
      return R"(d = load("phase1_state.csv")
plt.plot(d["t"], d["fh1"], label="f_h,1")
plt.plot(d["t"], d["fh2"], label="f_h,2")
plt.xlabel("t [s]")
plt.ylabel("human force [N]")
plt.legend()
plt.title("Human force vs time")
)";
    case 4:
    case 5:
      return nullptr;  // built in tracking_plot
    case 6:
      return R"(d = load("tracking.csv")
plt.plot(d["t"], d["ec1"], label="e_c,1")
plt.plot(d["t"], d["ec2"], label="e_c,2")
plt.xlabel("t [s]")
plt.ylabel("commutative error")
plt.legend()
plt.title("Commutative tracking errors")
)";
    default:
      return nullptr;
  }
}

std::string tracking_plot(int joint) {
  const std::string j = std::to_string(joint);
  return "d = load(\"tracking.csv\")\n"
         "plt.plot(d[\"t\"], d[\"qd" + j + "\"], \"--\", label=\"desired\")\n"
         "plt.plot(d[\"t\"], d[\"q" + j + "\"], label=\"actual\")\n"
         "plt.xlabel(\"t [s]\")\n"
         "plt.ylabel(\"q" + j + " [rad]\")\n"
         "plt.legend()\n"
         "plt.title(\"Joint " + j + " tracking\")\n";
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view text) {
  double v = 0.0;
  const char* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end) {
    throw DomainError("not a number: '" + std::string(text) + "'");
  }
  return v;
}

std::string phase1_csv(const Phase1Result& phase1) {
  CsvWriter w(kPhase1Header);
  const OptimalTrajectory& opt = phase1.optimal;
  for (std::size_t k = 0; k < opt.times.size(); ++k) {
    w.cell(opt.times[k]).cell(opt.states[k]).cell(opt.controls[k]).end_row();
  }
  return w.str();
}

std::string reference_csv(const ReferenceTrajectory& reference) {
  CsvWriter w(kReferenceHeader);
  for (std::size_t k = 0; k < reference.q.size(); ++k) {
    w.cell(reference.cartesian.times[k]).cell(reference.q[k]).cell(reference.qdot[k]).end_row();
  }
  return w.str();
}

std::string tracking_csv(const TrackingRecord& tr) {
  CsvWriter w(kTrackingHeader);
  for (std::size_t k = 0; k < tr.times.size(); ++k) {
    w.cell(tr.times[k])
        .cell(tr.q[k])
        .cell(tr.q_desired[k])
        .cell(tr.e[k])
        .cell(tr.e_c[k])
        .cell(tr.tau[k])
        .cell(tr.k_r[k])
        .end_row();
  }
  return w.str();
}

std::string metrics_csv(const Metrics& metrics) {
  CsvWriter w(kMetricsHeader);
  for (const auto& [key, value] : metrics) w.cell(key).cell(value).end_row();
  return w.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path.string(), "cannot open for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.close();
  if (!out) throw IoError(path.string(), "write failed");
}

OutputBundle write_timeseries(const SimulationReport& report,
                              const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError(dir.string(), "cannot create directory: " + ec.message());

  OutputBundle bundle{dir, {}};
  auto put = [&](const char* name, const std::string& text) {
    const std::filesystem::path path = dir / name;
    write_text_file(path, text);
    bundle.files.push_back(path);
  };
  put("phase1_state.csv", phase1_csv(report.phase1));
  put("reference.csv", reference_csv(report.reference));
  put("tracking.csv", tracking_csv(report.tracking));
  put("metrics.csv", metrics_csv(report.metrics));
  put("config_resolved.json", serialize_config(report.config));
  return bundle;
}

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw DomainError("no column named " + name);
}

std::vector<double> CsvTable::series(const std::string& name) const {
  const std::size_t c = column(name);
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& row : rows) out.push_back(row[c]);
  return out;
}

CsvTable parse_csv(std::string_view text) {
  const auto lines = lines_of(text);
  if (lines.empty()) throw DomainError("empty CSV");
  CsvTable table;
  for (std::string_view h : split(lines.front(), ',')) table.header.emplace_back(h);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto cells = split(lines[i], ',');
    if (cells.size() != table.header.size()) {
      throw DomainError("row " + std::to_string(i) + " has " + std::to_string(cells.size()) +
                        " fields, expected " + std::to_string(table.header.size()));
    }
    std::vector<double> row;
    row.reserve(cells.size());
    for (std::string_view c : cells) row.push_back(parse_double(c));
    table.rows.push_back(std::move(row));
  }
  return table;
}

CsvTable read_csv(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  try {
    return parse_csv(text);
  } catch (const DomainError& e) {
    throw IoError(path.string(), e.what());
  }
}

ReferenceTrajectory read_reference(const std::filesystem::path& reference_csv_path,
                                   const std::filesystem::path& phase1_csv_path) {
  const CsvTable ref = read_csv(reference_csv_path);
  const std::string path = reference_csv_path.string();
  ReferenceTrajectory out;
  try {
    for (const char* name : {"t", "qd1", "qd2", "qdd1", "qdd2"}) ref.column(name);
  } catch (const DomainError& e) {
    throw IoError(path, e.what());
  }
  if (ref.rows.empty()) throw IoError(path, "no samples");
  const std::size_t t = ref.column("t");
  const std::size_t q1 = ref.column("qd1"), q2 = ref.column("qd2");
  const std::size_t v1 = ref.column("qdd1"), v2 = ref.column("qdd2");
  const std::size_t n = ref.rows.size();
  for (const auto& row : ref.rows) {
    out.cartesian.times.push_back(row[t]);
    out.q.emplace_back(row[q1], row[q2]);
    out.qdot.emplace_back(row[v1], row[v2]);
  }
  for (std::size_t k = 1; k < n; ++k) {
    const double h = out.cartesian.times[k] - out.cartesian.times[k - 1];
    const double h0 = (out.cartesian.times.back() - out.cartesian.times.front()) / (n - 1);
    if (!(h > 0.0) || std::abs(h - h0) > 1e-6 * h0) {
      throw IoError(path, "time column must be increasing on a uniform grid");
    }
  }

  out.cartesian.position.assign(n, Eigen::Vector2d::Zero());
  out.cartesian.velocity.assign(n, Eigen::Vector2d::Zero());
  out.cartesian.force.assign(n, Eigen::Vector2d::Zero());
  if (!phase1_csv_path.empty()) {
    const CsvTable p1 = read_csv(phase1_csv_path);
    if (p1.rows.size() != n) {
      throw IoError(phase1_csv_path.string(), "sample count differs from the reference");
    }
    try {
      const std::size_t pt = p1.column("t");
      const std::size_t x1 = p1.column("ximp1"), x2 = p1.column("ximp2");
      const std::size_t d1 = p1.column("xdimp1"), d2 = p1.column("xdimp2");
      const std::size_t f1 = p1.column("fh1"), f2 = p1.column("fh2");
      for (std::size_t k = 0; k < n; ++k) {
        const auto& row = p1.rows[k];
        if (row[pt] != out.cartesian.times[k]) {
          throw DomainError("time grid differs from the reference at row " +
                            std::to_string(k + 1));
        }
        out.cartesian.position[k] = {row[x1], row[x2]};
        out.cartesian.velocity[k] = {row[d1], row[d2]};
        out.cartesian.force[k] = {row[f1], row[f2]};
      }
    } catch (const DomainError& e) {
      throw IoError(phase1_csv_path.string(), e.what());
    }
  }
  return out;
}

std::filesystem::path emit_plot_script(const std::filesystem::path& dir, int figure) {
  if (figure < 1 || figure > 6) {
    throw DomainError("unknown figure " + std::to_string(figure) + " (expected 1..6)");
  }
  const std::string body =
      (figure == 4 || figure == 5) ? tracking_plot(figure - 3) : plot_body(figure);
  const std::string name = "fig" + std::to_string(figure);
  std::string script =
      "import os\n"
      "import numpy as np\n"
      "import matplotlib\n"
      "matplotlib.use(\"Agg\")\n"
      "import matplotlib.pyplot as plt\n"
      "\n"
      "here = os.path.dirname(os.path.abspath(__file__))\n"
      "\n"
      "\n"
      "def load(name):\n"
      "    return np.genfromtxt(os.path.join(here, name), delimiter=\",\", names=True)\n"
      "\n"
      "\n";
  script += body;
  script += "plt.grid(True)\nplt.savefig(os.path.join(here, \"" + name + ".png\"), dpi=150)\n";
  const std::filesystem::path path = dir / (name + ".py");
  write_text_file(path, script);
  return path;
}

}  // namespace hrc
