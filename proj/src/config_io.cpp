#include "hrc/config_io.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "hrc/errors.hpp"

namespace hrc {
namespace {

using Json = nlohmann::json;
using OrderedJson = nlohmann::ordered_json;

// Walks one JSON object, tracking which keys were read so leftovers can be
// reported as unknown.
class Section {
 public:
  Section(const Json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) throw ConfigError(display(), "expected an object");
  }

  std::string key_path(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  const Json* find(const std::string& key) {
    used_.insert(key);
    const auto it = node_.find(key);
    return it == node_.end() ? nullptr : &*it;
  }

  const Json& require(const std::string& key) {
    const Json* value = find(key);
    if (value == nullptr) throw ConfigError(key_path(key), "missing required key");
    return *value;
  }

  double number(const std::string& key) { return as_number(require(key), key_path(key)); }

  double number_or(const std::string& key, double fallback) {
    const Json* value = find(key);
    return value == nullptr ? fallback : as_number(*value, key_path(key));
  }

  Section section(const std::string& key) { return Section(require(key), key_path(key)); }

  void finish() const {
    for (const auto& item : node_.items()) {
      if (!used_.contains(item.key())) {
        throw ConfigError(key_path(item.key()), "unknown key");
      }
    }
  }

  static double as_number(const Json& value, const std::string& key) {
    if (!value.is_number()) throw ConfigError(key, "expected a number");
    return value.get<double>();
  }

 private:
  std::string display() const { return path_.empty() ? "<document>" : path_; }

  const Json& node_;
  std::string path_;
  std::set<std::string> used_;
};

Eigen::MatrixXd parse_matrix(const Json& value, const std::string& key) {
  const char* expected = "expected a row-major nested list of numbers";
  if (!value.is_array() || value.empty() || !value.front().is_array()) {
    throw ConfigError(key, expected);
  }
  const std::size_t rows = value.size();
  const std::size_t cols = value.front().size();
  if (cols == 0) throw ConfigError(key, expected);
  Eigen::MatrixXd m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    const Json& row = value[i];
    if (!row.is_array() || row.size() != cols) {
      throw ConfigError(key, "rows must be lists of equal length");
    }
    for (std::size_t j = 0; j < cols; ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          Section::as_number(row[j], key);
    }
  }
  return m;
}

Eigen::Vector2d parse_vector2(const Json& value, const std::string& key) {
  if (!value.is_array() || value.size() != 2) {
    throw ConfigError(key, "expected a list of 2 numbers");
  }
  return {Section::as_number(value[0], key), Section::as_number(value[1], key)};
}

Eigen::VectorXd parse_vector(const Json& value, const std::string& key) {
  if (!value.is_array() || value.empty()) {
    throw ConfigError(key, "expected a non-empty list of numbers");
  }
  Eigen::VectorXd v(static_cast<Eigen::Index>(value.size()));
  for (std::size_t i = 0; i < value.size(); ++i) {
    v(static_cast<Eigen::Index>(i)) = Section::as_number(value[i], key);
  }
  return v;
}

MatrixSchedule parse_schedule(const Json& value, const std::string& key) {
  if (value.is_array()) return MatrixSchedule::constant(parse_matrix(value, key));
  Section s(value, key);
  const Json& kind_node = s.require("kind");
  if (!kind_node.is_string()) throw ConfigError(s.key_path("kind"), "expected a string");
  const std::string kind = kind_node.get<std::string>();
  MatrixSchedule out;
  try {
    if (kind == "constant") {
      out = MatrixSchedule::constant(parse_matrix(s.require("base"), s.key_path("base")));
    } else if (kind == "sinusoidal") {
      out = MatrixSchedule::sinusoidal(
          parse_matrix(s.require("base"), s.key_path("base")),
          parse_matrix(s.require("amplitude"), s.key_path("amplitude")),
          s.number("frequency"));
    } else if (kind == "tabulated") {
      const Json& times = s.require("times");
      const Json& values = s.require("values");
      if (!times.is_array() || !values.is_array()) {
        throw ConfigError(key, "tabulated schedules need lists 'times' and 'values'");
      }
      std::vector<double> ts;
      for (const Json& t : times) ts.push_back(Section::as_number(t, s.key_path("times")));
      std::vector<Eigen::MatrixXd> ms;
      for (const Json& m : values) ms.push_back(parse_matrix(m, s.key_path("values")));
      out = MatrixSchedule::tabulated(std::move(ts), std::move(ms));
    } else {
      throw ConfigError(s.key_path("kind"),
                        "expected one of constant, sinusoidal, tabulated");
    }
  } catch (const DomainError& e) {
    throw ConfigError(key, e.what());
  }
  s.finish();
  return out;
}

BoundaryState parse_boundary(Section s) {
  BoundaryState b;
  b.position = parse_vector2(s.require("position"), s.key_path("position"));
  if (const Json* v = s.find("velocity")) b.velocity = parse_vector2(*v, s.key_path("velocity"));
  if (const Json* f = s.find("force")) b.force = parse_vector2(*f, s.key_path("force"));
  s.finish();
  return b;
}

OrderedJson matrix_json(const Eigen::MatrixXd& m) {
  OrderedJson rows = OrderedJson::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    OrderedJson row = OrderedJson::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

OrderedJson vector_json(const Eigen::VectorXd& v) {
  OrderedJson out = OrderedJson::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

OrderedJson schedule_json(const MatrixSchedule& s) {
  switch (s.kind()) {
    case MatrixSchedule::Kind::kConstant:
      return matrix_json(s.base());
    case MatrixSchedule::Kind::kSinusoidal: {
      OrderedJson out;
      out["kind"] = "sinusoidal";
      out["base"] = matrix_json(s.base());
      out["amplitude"] = matrix_json(s.amplitude());
      out["frequency"] = s.frequency();
      return out;
    }
    case MatrixSchedule::Kind::kTabulated: {
      OrderedJson out;
      out["kind"] = "tabulated";
      out["times"] = s.times();
      OrderedJson values = OrderedJson::array();
      for (const auto& m : s.values()) values.push_back(matrix_json(m));
      out["values"] = std::move(values);
      return out;
    }
  }
  return {};
}

OrderedJson boundary_json(const BoundaryState& b) {
  OrderedJson out;
  out["position"] = vector_json(b.position);
  out["velocity"] = vector_json(b.velocity);
  out["force"] = vector_json(b.force);
  return out;
}

Json parse_document(std::string_view text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ConfigError("<document>", std::string("malformed JSON: ") + e.what());
  }
}

}  // namespace

ScenarioConfig parse_config(std::string_view text) {
  const Json doc = parse_document(text);
  Section root(doc, "");
  ScenarioConfig c;

  {
    Section s = root.section("manipulator");
    const double m1 = s.number("m1");
    const double m2 = s.number("m2");
    const double l1 = s.number("l1");
    const double l2 = s.number("l2");
    c.arm = ManipulatorParams::uniform_rods(m1, m2, l1, l2, s.number_or("g", 9.81));
    c.arm.i1 = s.number_or("i1", c.arm.i1);
    c.arm.i2 = s.number_or("i2", c.arm.i2);
    s.finish();
  }
  {
    Section s = root.section("impedance");
    c.impedance.mass = parse_schedule(s.require("mass"), s.key_path("mass"));
    c.impedance.damping = parse_schedule(s.require("damping"), s.key_path("damping"));
    c.impedance.stiffness = parse_schedule(s.require("stiffness"), s.key_path("stiffness"));
    s.finish();
  }
  {
    Section s = root.section("human");
    c.human.damping = parse_schedule(s.require("damping"), s.key_path("damping"));
    c.human.stiffness = parse_schedule(s.require("stiffness"), s.key_path("stiffness"));
    c.human.control_gain =
        parse_schedule(s.require("control_gain"), s.key_path("control_gain"));
    s.finish();
  }
  {
    Section s = root.section("cost");
    c.cost.q = parse_schedule(s.require("Q"), s.key_path("Q"));
    c.cost.r = parse_schedule(s.require("R"), s.key_path("R"));
    if (const Json* v = s.find("S")) {
      c.cost.s = parse_schedule(*v, s.key_path("S"));
    } else {
      c.cost.s = MatrixSchedule::constant(Eigen::MatrixXd::Zero(6, 2));
    }
    s.finish();
  }
  {
    Section s = root.section("boundary");
    c.initial = parse_boundary(s.section("initial"));
    c.target = parse_boundary(s.section("final"));
    s.finish();
  }
  if (root.find("horizon") != nullptr) {
    Section s = root.section("horizon");
    c.t0 = s.number_or("t0", c.t0);
    c.tf = s.number_or("tf", c.tf);
    s.finish();
  }
  if (root.find("integrator") != nullptr) {
    Section s = root.section("integrator");
    c.optimize_step = s.number_or("optimize_step", c.optimize_step);
    c.tracking.step = s.number_or("track_step", c.tracking.step);
    s.finish();
  }
  if (root.find("rbf") != nullptr) {
    Section s = root.section("rbf");
    if (const Json* v = s.find("nodes")) {
      if (!v->is_number_integer()) throw ConfigError("rbf.nodes", "expected an integer");
      c.rbf.nodes = v->get<int>();
    }
    if (const Json* v = s.find("seed")) {
      if (!v->is_number_unsigned()) {
        throw ConfigError("rbf.seed", "expected a non-negative integer");
      }
      c.rbf.seed = v->get<std::uint64_t>();
    }
    c.rbf.width = s.number_or("width", c.rbf.width);
    if (const Json* v = s.find("input_scale")) {
      if (!v->is_array() || v->size() != 3) {
        throw ConfigError("rbf.input_scale", "expected [error, rate, commutative]");
      }
      c.rbf.error_scale = Section::as_number((*v)[0], "rbf.input_scale");
      c.rbf.rate_scale = Section::as_number((*v)[1], "rbf.input_scale");
      c.rbf.commutative_scale = Section::as_number((*v)[2], "rbf.input_scale");
    }
    s.finish();
  }
  {
    Section s = root.section("controller");
    c.gains.zeta = s.number("zeta");
    c.gains.k_rc = s.number("k_rc");
    c.gains.alpha = s.number("alpha");
    c.gains.sigma = s.number("sigma");
    if (const Json* g = s.find("gamma")) {
      if (g->is_number()) {
        if (c.rbf.nodes < 1) throw ConfigError("rbf.nodes", "must be at least 1");
        c.gains.gamma = g->get<double>() * Eigen::MatrixXd::Identity(c.rbf.nodes, c.rbf.nodes);
      } else {
        c.gains.gamma = parse_matrix(*g, "controller.gamma");
      }
    }
    if (const Json* v = s.find("initial_offset")) {
      c.tracking.initial_offset = parse_vector2(*v, "controller.initial_offset");
    }
    c.tracking.settle_time = s.number_or("settle_time", c.tracking.settle_time);
    c.tracking.final_window = s.number_or("final_window", c.tracking.final_window);
    if (const Json* v = s.find("ik_branch")) {
      const std::string branch = v->is_string() ? v->get<std::string>() : "";
      if (branch == "elbow-down") {
        c.tracking.branch = ElbowBranch::kDown;
      } else if (branch == "elbow-up") {
        c.tracking.branch = ElbowBranch::kUp;
      } else {
        throw ConfigError("controller.ik_branch", "expected \"elbow-down\" or \"elbow-up\"");
      }
    }
    s.finish();
  }
  if (root.find("output") != nullptr) {
    Section s = root.section("output");
    if (const Json* v = s.find("emit_plots")) {
      if (!v->is_boolean()) throw ConfigError("output.emit_plots", "expected a boolean");
      c.emit_plots = v->get<bool>();
    }
    s.finish();
  }
  root.finish();

  c.validate();
  return c;
}

std::string serialize_config(const ScenarioConfig& c) {
  OrderedJson doc;
  doc["manipulator"] = {{"m1", c.arm.m1}, {"m2", c.arm.m2}, {"l1", c.arm.l1},
                        {"l2", c.arm.l2}, {"i1", c.arm.i1}, {"i2", c.arm.i2},
                        {"g", c.arm.g}};
  doc["impedance"] = {{"mass", schedule_json(c.impedance.mass)},
                      {"damping", schedule_json(c.impedance.damping)},
                      {"stiffness", schedule_json(c.impedance.stiffness)}};
  doc["human"] = {{"damping", schedule_json(c.human.damping)},
                  {"stiffness", schedule_json(c.human.stiffness)},
                  {"control_gain", schedule_json(c.human.control_gain)}};
  doc["cost"] = {{"Q", schedule_json(c.cost.q)},
                 {"R", schedule_json(c.cost.r)},
                 {"S", schedule_json(c.cost.s)}};
  doc["boundary"] = {{"initial", boundary_json(c.initial)},
                     {"final", boundary_json(c.target)}};
  doc["horizon"] = {{"t0", c.t0}, {"tf", c.tf}};
  doc["integrator"] = {{"optimize_step", c.optimize_step},
                       {"track_step", c.tracking.step}};

  OrderedJson controller;
  controller["zeta"] = c.gains.zeta;
  controller["k_rc"] = c.gains.k_rc;
  controller["alpha"] = c.gains.alpha;
  controller["sigma"] = c.gains.sigma;
  const Eigen::MatrixXd& gamma = c.gains.gamma;
  if (gamma.size() > 0) {
    const double diag = gamma(0, 0);
    const bool scalar =
        gamma.rows() == c.rbf.nodes && gamma.cols() == c.rbf.nodes &&
        gamma == diag * Eigen::MatrixXd::Identity(gamma.rows(), gamma.cols());
    controller["gamma"] = scalar ? OrderedJson(diag) : matrix_json(gamma);
  }
  controller["initial_offset"] = vector_json(c.tracking.initial_offset);
  controller["settle_time"] = c.tracking.settle_time;
  controller["final_window"] = c.tracking.final_window;
  controller["ik_branch"] =
      c.tracking.branch == ElbowBranch::kDown ? "elbow-down" : "elbow-up";
  doc["controller"] = std::move(controller);

  doc["rbf"] = {{"nodes", c.rbf.nodes},
                {"seed", c.rbf.seed},
                {"width", c.rbf.width},
                {"input_scale",
                 {c.rbf.error_scale, c.rbf.rate_scale, c.rbf.commutative_scale}}};
  doc["output"] = {{"emit_plots", c.emit_plots}};
  return doc.dump(2) + "\n";
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path.string(), "cannot open for reading");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw IoError(path.string(), "read failed");
  return buffer.str();
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  return parse_config(read_text_file(path));
}

LQProblem parse_lq_problem(std::string_view text) {
  const Json doc = parse_document(text);
  Section s(doc, "");
  const Eigen::MatrixXd a = parse_matrix(s.require("A"), "A");
  const Eigen::MatrixXd b = parse_matrix(s.require("B"), "B");
  const Eigen::MatrixXd q = parse_matrix(s.require("Q"), "Q");
  const Eigen::MatrixXd r = parse_matrix(s.require("R"), "R");
  Eigen::MatrixXd sm = Eigen::MatrixXd::Zero(b.rows(), b.cols());
  if (const Json* v = s.find("S")) sm = parse_matrix(*v, "S");
  const double t0 = s.number_or("t0", 0.0);
  const double tf = s.number("tf");
  const Eigen::VectorXd x0 = parse_vector(s.require("x0"), "x0");
  const Eigen::VectorXd xf = parse_vector(s.require("xf"), "xf");
  s.finish();

  LQProblem problem = LQProblem::time_invariant(a, b, q, sm, r, t0, tf, x0, xf);
  try {
    problem.validate(2);
  } catch (const DomainError& e) {
    throw ConfigError("<problem>", e.what());
  }
  return problem;
}

}  // namespace hrc
