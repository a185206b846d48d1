#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "tiltflow/estimate.hpp"
#include "tiltflow/geometry.hpp"

namespace tiltflow {

using Json = nlohmann::json;

/// A library error pinned to the config field that caused it.
class FieldError : public Error {
 public:
  FieldError(ErrorKind kind, std::string field, const std::string& message)
      : Error(kind, message), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

enum class Command { Flow, Nu, Limit, Lln, Deviation, Selftest };

inline std::optional<Command> parse_command(std::string_view s) {
  static const std::map<std::string_view, Command> names{
      {"flow", Command::Flow}, {"nu", Command::Nu},
      {"limit", Command::Limit}, {"lln", Command::Lln},
      {"deviation", Command::Deviation}, {"selftest", Command::Selftest}};
  const auto it = names.find(s);
  if (it == names.end()) return std::nullopt;
  return it->second;
}

inline std::string to_string(Command c) {
  switch (c) {
    case Command::Flow: return "flow";
    case Command::Nu: return "nu";
    case Command::Limit: return "limit";
    case Command::Lln: return "lln";
    case Command::Deviation: return "deviation";
    case Command::Selftest: break;
  }
  return "selftest";
}

struct NuCurveConfig {
  std::string kind = "closed_form";  // closed_form | constant | table | estimated
  double value = 1.0;
  std::vector<std::pair<double, double>> points;  // table
  std::vector<double> angles;                     // estimated: run estimate_nu at each
};

struct Config {
  Command command = Command::Flow;

  // one instance (flow)
  double theta = 0.0;
  std::optional<Vec2> a, b;
  int n = 0;
  double h = 0.0;
  std::optional<double> k, theta_tilde;
  std::uint64_t replication = 0;

  // experiments
  std::vector<int> n_values;
  HeightRule rule;
  Distribution dist = dist::Dirac{1.0};
  Json dist_record;  // as given, echoed into reports
  int reps = 1;
  std::uint64_t seed = 0;
  CapacityMode mode = CapacityMode::exact();
  int grid_size = 129;
  std::optional<double> alpha;
  double eta = 0.2;
  Observable observable = Observable::Phi;
  std::optional<NuCurveConfig> nu_curve;

  // selftest
  int oracle_count = 200;
  int duality_count = 500;

  std::string output_dir = ".";

  CylinderSpec spec() const {
    CylinderSpec s = CylinderSpec::centered_unit(theta, n, h);
    if (a) s.a = *a;
    if (b) s.b = *b;
    return s;
  }

  Experiment experiment() const { return {theta, dist, n_values, rule, reps, seed, mode}; }
};

namespace detail {

// Reads the keys of one JSON object and rejects any key it was not asked about.
class ObjectReader {
 public:
  ObjectReader(const Json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj.is_object()) fail(path_.empty() ? "config" : path_, "expected an object");
  }

  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  const Json* find(const std::string& key) {
    seen_.insert(key);
    const auto it = obj_.find(key);
    return it == obj_.end() ? nullptr : &*it;
  }

  const Json& require(const std::string& key) {
    const Json* v = find(key);
    if (!v) fail(field(key), "missing required field");
    return *v;
  }

  double number(const std::string& key, const Json& v) const {
    if (!v.is_number()) fail(field(key), "expected a number");
    return v.get<double>();
  }
  std::int64_t integer(const std::string& key, const Json& v) const {
    if (!v.is_number_integer()) fail(field(key), "expected an integer");
    return v.get<std::int64_t>();
  }
  std::string text(const std::string& key, const Json& v) const {
    if (!v.is_string()) fail(field(key), "expected a string");
    return v.get<std::string>();
  }

  std::optional<double> opt_number(const std::string& key) {
    const Json* v = find(key);
    return v ? std::optional(number(key, *v)) : std::nullopt;
  }
  std::optional<std::int64_t> opt_integer(const std::string& key) {
    const Json* v = find(key);
    return v ? std::optional(integer(key, *v)) : std::nullopt;
  }
  std::optional<std::string> opt_text(const std::string& key) {
    const Json* v = find(key);
    return v ? std::optional(text(key, *v)) : std::nullopt;
  }

  std::vector<double> numbers(const std::string& key, const Json& v) const {
    if (!v.is_array()) fail(field(key), "expected an array of numbers");
    std::vector<double> out;
    for (const Json& x : v) out.push_back(number(key, x));
    return out;
  }

  Vec2 point(const std::string& key, const Json& v) const {
    const std::vector<double> xy = numbers(key, v);
    if (xy.size() != 2) fail(field(key), "expected [x, y]");
    return {xy[0], xy[1]};
  }

  void finish() const {
    for (const auto& [key, value] : obj_.items()) {
      if (!seen_.count(key)) fail(field(key), "unknown field");
    }
  }

  [[noreturn]] static void fail(const std::string& field, const std::string& message) {
    throw FieldError(ErrorKind::ConfigError, field, message);
  }

 private:
  const Json& obj_;
  std::string path_;
  std::set<std::string> seen_;
};

inline Distribution parse_distribution(const Json& rec) {
  ObjectReader r(rec, "distribution");
  const std::string kind = r.text("kind", r.require("kind"));
  const auto num = [&r](const char* key) { return r.number(key, r.require(key)); };
  const auto build = [&]() -> Distribution {
    if (kind == "dirac") return dist::Dirac{num("value")};
    if (kind == "bernoulli") return dist::Bernoulli{num("p"), num("value")};
    if (kind == "uniform") return dist::UniformReal{num("lo"), num("hi")};
    if (kind == "exponential") return dist::Exponential{num("rate")};
    if (kind == "table") {
      return dist::DiscreteTable{r.numbers("values", r.require("values")),
                                 r.numbers("probs", r.require("probs"))};
    }
    ObjectReader::fail("distribution.kind", "unknown distribution kind '" + kind + "'");
  };
  Distribution d = [&] {
    try {
      return build();
    } catch (const FieldError&) {
      throw;
    } catch (const Error& e) {
      throw FieldError(e.kind(), "distribution", e.detail());
    }
  }();
  r.finish();
  return d;
}

inline HeightRule parse_height_rule(const Json& rec) {
  ObjectReader r(rec, "height_rule");
  const std::string kind = r.text("kind", r.require("kind"));
  HeightRule rule;
  if (kind == "linear" || kind == "sqrt") {
    const double c = r.opt_number("c").value_or(1.0);
    rule = kind == "linear" ? HeightRule::linear(c) : HeightRule::sqrt(c);
  } else if (kind == "table") {
    const Json& values = r.require("values");
    if (!values.is_object()) ObjectReader::fail("height_rule.values", "expected an object n -> h");
    std::map<int, double> table;
    for (const auto& [key, h] : values.items()) {
      int n = 0;
      std::istringstream in(key);
      if (!(in >> n) || !in.eof()) ObjectReader::fail("height_rule.values", "keys must be integers");
      if (!h.is_number()) ObjectReader::fail("height_rule.values." + key, "expected a number");
      table[n] = h.get<double>();
    }
    rule = HeightRule::explicit_table(std::move(table));
  } else {
    ObjectReader::fail("height_rule.kind", "unknown height rule '" + kind + "'");
  }
  r.finish();
  return rule;
}

inline NuCurveConfig parse_nu_curve(const Json& rec) {
  ObjectReader r(rec, "nu_curve");
  NuCurveConfig c;
  c.kind = r.text("kind", r.require("kind"));
  if (c.kind == "closed_form") {
    c.value = r.opt_number("value").value_or(1.0);
  } else if (c.kind == "constant") {
    c.value = r.number("value", r.require("value"));
  } else if (c.kind == "table") {
    const Json& pts = r.require("points");
    if (!pts.is_array()) ObjectReader::fail("nu_curve.points", "expected [[angle, nu], ...]");
    for (const Json& p : pts) {
      const Vec2 xy = r.point("points", p);
      c.points.emplace_back(xy.x, xy.y);
    }
  } else if (c.kind == "estimated") {
    c.angles = r.numbers("angles", r.require("angles"));
  } else {
    ObjectReader::fail("nu_curve.kind", "unknown nu curve kind '" + c.kind + "'");
  }
  r.finish();
  return c;
}

}  // namespace detail

/// Strict parse: unknown keys anywhere are rejected. Keys that only matter to
/// other commands are accepted and ignored.
inline Config parse_config(Command command, const Json& doc) {
  using detail::ObjectReader;
  ObjectReader r(doc, "");
  Config c;
  c.command = command;
  if (const auto named = r.opt_text("command")) {
    if (parse_command(*named) != command) {
      ObjectReader::fail("command", "config is for '" + *named + "', not '" + to_string(command) + "'");
    }
  }
  c.theta = r.opt_number("theta").value_or(c.theta);
  if (const Json* v = r.find("a")) c.a = r.point("a", *v);
  if (const Json* v = r.find("b")) c.b = r.point("b", *v);
  c.n = static_cast<int>(r.opt_integer("n").value_or(0));
  c.h = r.opt_number("h").value_or(0.0);
  c.k = r.opt_number("k");
  c.theta_tilde = r.opt_number("theta_tilde");
  if (const auto rep = r.opt_integer("replication")) {
    if (*rep < 0) ObjectReader::fail("replication", "must be nonnegative");
    c.replication = static_cast<std::uint64_t>(*rep);
  }

  if (const Json* v = r.find("n_values")) {
    if (!v->is_array()) ObjectReader::fail("n_values", "expected an array of integers");
    for (const Json& x : *v) c.n_values.push_back(static_cast<int>(r.integer("n_values", x)));
  }
  if (const Json* v = r.find("height_rule")) c.rule = detail::parse_height_rule(*v);
  if (const Json* v = r.find("distribution")) {
    c.dist = detail::parse_distribution(*v);
    c.dist_record = *v;
  } else {
    c.dist_record = {{"kind", "dirac"}, {"value", 1.0}};
  }
  c.reps = static_cast<int>(r.opt_integer("reps").value_or(1));
  if (const Json* v = r.find("seed")) {
    if (!v->is_number_unsigned()) ObjectReader::fail("seed", "expected a nonnegative integer");
    c.seed = v->get<std::uint64_t>();
  }
  const std::string mode = r.opt_text("mode").value_or(c.dist.is_continuous() ? "real" : "integer");
  const auto scale = r.opt_integer("scale").value_or(1);
  if (mode == "integer") {
    c.mode = CapacityMode::exact(scale);
  } else if (mode == "real") {
    c.mode = CapacityMode::real();
  } else {
    ObjectReader::fail("mode", "expected \"integer\" or \"real\"");
  }
  c.grid_size = static_cast<int>(r.opt_integer("grid_size").value_or(129));
  c.alpha = r.opt_number("alpha");
  c.eta = r.opt_number("eta").value_or(c.eta);
  if (const auto obs = r.opt_text("observable")) {
    if (*obs == "phi") c.observable = Observable::Phi;
    else if (*obs == "tau") c.observable = Observable::Tau;
    else if (*obs == "phi_over_tau") c.observable = Observable::PhiOverTau;
    else ObjectReader::fail("observable", "expected phi, tau or phi_over_tau");
  }
  if (const Json* v = r.find("nu_curve")) c.nu_curve = detail::parse_nu_curve(*v);
  c.oracle_count = static_cast<int>(r.opt_integer("oracle_count").value_or(200));
  c.duality_count = static_cast<int>(r.opt_integer("duality_count").value_or(500));
  c.output_dir = r.opt_text("output_dir").value_or(".");
  r.finish();
  return c;
}

namespace detail {

inline void check(bool ok, ErrorKind kind, const std::string& field, const std::string& message) {
  if (!ok) throw FieldError(kind, field, message);
}

// Runs a module precondition and blames `field` if it throws.
template <class F>
void blame(const std::string& field, F&& f) {
  try {
    f();
  } catch (const FieldError&) {
    throw;
  } catch (const Error& e) {
    throw FieldError(e.kind(), field, e.detail());
  }
}

inline void validate_experiment(const Config& c) {
  check(std::isfinite(c.theta) && c.theta >= 0.0 && c.theta < std::numbers::pi,
        ErrorKind::InvalidSpec, "theta", "theta must lie in [0, pi)");
  check(!c.n_values.empty(), ErrorKind::BadSchedule, "n_values", "n_values is required");
  for (std::size_t i = 1; i < c.n_values.size(); ++i) {
    check(c.n_values[i] > c.n_values[i - 1], ErrorKind::BadSchedule, "n_values",
          "n_values must be strictly increasing");
  }
  for (const int n : c.n_values) {
    check(n >= 2, ErrorKind::DegenerateCylinder, "n_values", "every n must be at least 2 (n l(A) >= 2)");
  }
  check(c.reps >= 1, ErrorKind::InvalidSpec, "reps", "reps must be at least 1");
  blame("distribution", [&] {
    if (!c.dist.has_finite_first_moment()) throw Error(ErrorKind::InfiniteMean, "no finite mean");
  });
  blame("mode", [&] { sample(c.dist, 0, c.seed, 0, c.mode); });
  blame("height_rule", [&] {
    const Experiment ex = c.experiment();
    tiltflow::detail::validate(ex);
    for (const int n : c.n_values) {
      const double h = c.rule(n);
      if (!(h >= 1.0)) throw Error(ErrorKind::DegenerateCylinder, "h(" + std::to_string(n) + ") < 1");
    }
  });
}

}  // namespace detail

/// Checks every field the command will use against the preconditions of the
/// module that consumes it, before anything is computed.
inline void validate_config(const Config& c) {
  using detail::blame;
  using detail::check;
  switch (c.command) {
    case Command::Flow: {
      check(std::isfinite(c.theta) && c.theta >= 0.0 && c.theta < std::numbers::pi,
            ErrorKind::InvalidSpec, "theta", "theta must lie in [0, pi)");
      check(c.n >= 1, ErrorKind::InvalidSpec, "n", "n is required and must be at least 1");
      check(c.h >= 1.0, ErrorKind::DegenerateCylinder, "h", "h is required and must be at least 1");
      check(c.a.has_value() == c.b.has_value(), ErrorKind::ConfigError, c.a ? "b" : "a",
            "a and b must be given together");
      blame(c.a ? "b" : "n", [&] { validate(c.spec()); });
      blame("mode", [&] { sample(c.dist, 0, c.seed, 0, c.mode); });
      check(c.k.has_value() == c.theta_tilde.has_value(), ErrorKind::ConfigError,
            c.k ? "theta_tilde" : "k", "k and theta_tilde must be given together");
      if (c.k) {
        check(is_admissible(c.spec(), *c.k, *c.theta_tilde), ErrorKind::NotAdmissible, "k",
              "(k, theta_tilde) is not an admissible boundary condition");
      }
      break;
    }
    case Command::Nu:
      detail::validate_experiment(c);
      break;
    case Command::Lln:
    case Command::Deviation:
      detail::validate_experiment(c);
      if (c.command == Command::Lln) {
        blame("height_rule", [&] { tiltflow::detail::check_schedule(c.experiment()); });
      } else {
        check(c.dist.mass_at_zero() < 0.5, ErrorKind::PreconditionViolated, "distribution",
              "the lower-tail experiment needs F(0) < 1/2");
        check(c.eta > 0.0 && c.eta <= 1.0, ErrorKind::PreconditionViolated, "eta",
              "eta must lie in (0, 1]");
      }
      if (c.nu_curve && c.nu_curve->kind == "estimated") {
        check(!c.nu_curve->angles.empty(), ErrorKind::EmptyGrid, "nu_curve.angles", "no angles");
      }
      break;
    case Command::Limit:
      check(std::isfinite(c.theta), ErrorKind::InvalidSpec, "theta", "theta must be finite");
      check(c.nu_curve.has_value(), ErrorKind::ConfigError, "nu_curve", "nu_curve is required");
      check(c.grid_size >= 3, ErrorKind::EmptyGrid, "grid_size", "grid_size must be at least 3");
      if (c.alpha) {
        check(*c.alpha >= 0.0 && *c.alpha <= std::numbers::pi / 2, ErrorKind::InvalidSpec, "alpha",
              "alpha must lie in [0, pi/2]");
      } else {
        check(c.rule.alpha().has_value(), ErrorKind::ConfigError, "alpha",
              "alpha is required with a table height rule");
      }
      if (c.nu_curve->kind == "table") {
        blame("nu_curve.points", [&] { NuCurve::estimated(c.nu_curve->points); });
      }
      if (c.nu_curve->kind == "estimated") {
        check(!c.nu_curve->angles.empty(), ErrorKind::EmptyGrid, "nu_curve.angles", "no angles");
        detail::validate_experiment(c);
      }
      break;
    case Command::Selftest:
      check(c.oracle_count >= 1, ErrorKind::ConfigError, "oracle_count", "must be positive");
      check(c.duality_count >= 1, ErrorKind::ConfigError, "duality_count", "must be positive");
      break;
  }
}

/// Applies `key.path=value`. The value is read as JSON when it parses,
/// otherwise as a string.
inline void apply_override(Json& doc, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0) {
    throw FieldError(ErrorKind::ConfigError, std::string(assignment), "--set expects key=value");
  }
  const std::string path(assignment.substr(0, eq));
  const std::string text(assignment.substr(eq + 1));
  Json value = Json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;

  Json* node = &doc;
  std::size_t start = 0;
  for (;;) {
    const std::size_t dot = path.find('.', start);
    const std::string key = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (key.empty()) throw FieldError(ErrorKind::ConfigError, path, "empty path segment");
    if (!node->is_object()) throw FieldError(ErrorKind::ConfigError, path, "not an object");
    if (dot == std::string::npos) {
      (*node)[key] = std::move(value);
      return;
    }
    node = &(*node)[key];
    if (node->is_null()) *node = Json::object();
    start = dot + 1;
  }
}

inline Json load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FieldError(ErrorKind::ConfigError, "config", "cannot open " + path);
  Json doc = Json::parse(in, nullptr, false);
  if (doc.is_discarded()) throw FieldError(ErrorKind::ConfigError, "config", path + " is not valid JSON");
  return doc;
}

}  // namespace tiltflow
