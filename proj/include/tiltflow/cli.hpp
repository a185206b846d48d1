#pragma once

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include "tiltflow/config.hpp"
#include "tiltflow/duality.hpp"
#include "tiltflow/estimate.hpp"
#include "tiltflow/selftest.hpp"

namespace tiltflow {

namespace exit_code {
constexpr int ok = 0;
constexpr int config_error = 2;
constexpr int runtime_error = 3;
constexpr int selftest_failure = 4;
}  // namespace exit_code

using OrderedJson = nlohmann::ordered_json;

namespace report {

// Shortest representation that reads back to the same double.
inline std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return {buf, res.ptr};
}

// JSON has no infinities; they become null.
inline OrderedJson number(double x) { return std::isfinite(x) ? OrderedJson(x) : OrderedJson(nullptr); }

inline OrderedJson summary_row(const Row& r) {
  return {{"n", r.n},
          {"h", r.h},
          {"reps", r.stats.count},
          {"mean", r.stats.mean},
          {"stderr", r.stats.std_error},
          {"min", r.stats.min},
          {"max", r.stats.max}};
}

/// RFC 4180 table: CRLF line ends, fields quoted only when needed.
class Csv {
 public:
  explicit Csv(std::vector<std::string> header) { line(header); }

  template <class... Cells>
  void row(const Cells&... cells) {
    std::vector<std::string> fields{cell(cells)...};
    line(fields);
  }

  const std::string& str() const { return text_; }

 private:
  static std::string cell(double x) { return format_double(x); }
  static std::string cell(int x) { return std::to_string(x); }
  static std::string cell(std::size_t x) { return std::to_string(x); }
  static std::string cell(const std::string& s) { return s; }

  void line(const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) text_ += ',';
      const std::string& f = fields[i];
      if (f.find_first_of(",\"\r\n") == std::string::npos) {
        text_ += f;
        continue;
      }
      text_ += '"';
      for (const char ch : f) {
        if (ch == '"') text_ += '"';
        text_ += ch;
      }
      text_ += '"';
    }
    text_ += "\r\n";
  }

  std::string text_;
};

inline Csv trajectory_table(const std::vector<Row>& rows) {
  Csv csv({"n", "h", "reps", "mean", "stderr", "min", "max"});
  for (const Row& r : rows) {
    csv.row(r.n, r.h, r.stats.count, r.stats.mean, r.stats.std_error, r.stats.min, r.stats.max);
  }
  return csv;
}

inline OrderedJson experiment_header(const Config& c) {
  OrderedJson j;
  j["theta"] = c.theta;
  j["distribution"] = OrderedJson::parse(c.dist_record.dump());
  j["mode"] = c.mode.is_exact() ? "integer" : "real";
  if (c.mode.is_exact()) j["scale"] = c.mode.scale;
  j["seed"] = c.seed;
  j["reps"] = c.reps;
  j["n_values"] = c.n_values;
  OrderedJson rule{{"kind", c.rule.name()}};
  if (c.rule.kind == HeightRule::Kind::Table) {
    for (const auto& [n, h] : c.rule.table) rule["values"][std::to_string(n)] = h;
  } else {
    rule["c"] = c.rule.c;
  }
  j["height_rule"] = rule;
  return j;
}

inline OrderedJson geometry(const CylinderGraph& g) {
  OrderedJson j;
  const CylinderSpec& s = g.spec();
  j["spec"] = {{"a", {s.a.x, s.a.y}}, {"b", {s.b.x, s.b.y}}, {"theta", s.theta},
               {"n", s.scale_n}, {"h", s.height_h}};
  OrderedJson vs = OrderedJson::array();
  for (const LatticePoint& p : g.vertices()) vs.push_back({p.x, p.y});
  OrderedJson es = OrderedJson::array();
  for (const LatticeEdge& e : g.edges()) es.push_back({e.u, e.v});
  j["vertices"] = std::move(vs);
  j["edges"] = std::move(es);
  const auto ids = [](std::span<const int> xs) { return OrderedJson(std::vector<int>(xs.begin(), xs.end())); };
  j["top"] = ids(g.top());
  j["bottom"] = ids(g.bottom());
  j["left"] = ids(g.left());
  j["right"] = ids(g.right());
  j["outer_layer"] = ids(g.outer_layer());
  return j;
}

}  // namespace report

/// Files a command produced, named relative to the output directory.
struct RunOutput {
  OrderedJson report;
  std::optional<std::string> table;     // CSV text
  std::optional<OrderedJson> geometry;  // flow --dump-geometry
  std::string summary;                  // one line for the terminal
  int status = exit_code::ok;
};

namespace detail {

inline NuCurve build_curve(const Config& c, OrderedJson& described) {
  const NuCurveConfig& nc = *c.nu_curve;
  described = {{"kind", nc.kind}};
  if (nc.kind == "closed_form") {
    described["value"] = nc.value;
    return NuCurve::dirac(nc.value);
  }
  if (nc.kind == "constant") {
    described["value"] = nc.value;
    return NuCurve::constant(nc.value);
  }
  std::vector<std::pair<double, double>> points = nc.points;
  if (nc.kind == "estimated") {
    for (const double angle : nc.angles) {
      Experiment ex = c.experiment();
      ex.theta = angle;
      const NuEstimate est = estimate_nu(ex);
      points.emplace_back(angle, est.extrapolated);
    }
  }
  OrderedJson pts = OrderedJson::array();
  for (const auto& [angle, nu] : points) pts.push_back({angle, nu});
  described["points"] = std::move(pts);
  return NuCurve::estimated(points);
}

inline RunOutput run_flow(const Config& c, bool dump_geometry) {
  const CylinderGraph graph = build_cylinder(c.spec());
  const CapacityMap caps = sample(c.dist, graph.edge_count(), c.seed, c.replication, c.mode);
  const FlowResult f = phi(graph, caps);
  const FlowResult t = tau(graph, caps);
  // no dual when T and B interleave along the outer face
  std::optional<DualityReport> d;
  std::size_t dual_vertices = 0;
  try {
    const DualGraph dual = build_dual(graph);
    dual_vertices = dual.vertex_count();
    d = verify_duality(graph, dual, caps);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::InterleavedTerminals) throw;
  }

  RunOutput out;
  OrderedJson& j = out.report;
  j["command"] = "flow";
  const CylinderSpec s = c.spec();
  j["spec"] = {{"a", {s.a.x, s.a.y}}, {"b", {s.b.x, s.b.y}}, {"theta", s.theta},
               {"n", s.scale_n}, {"h", s.height_h}};
  j["distribution"] = OrderedJson::parse(c.dist_record.dump());
  j["mode"] = c.mode.is_exact() ? "integer" : "real";
  if (c.mode.is_exact()) j["scale"] = c.mode.scale;
  j["seed"] = c.seed;
  j["replication"] = c.replication;
  j["graph"] = {{"vertices", graph.vertex_count()}, {"edges", graph.edge_count()},
                {"top", graph.top().size()}, {"bottom", graph.bottom().size()},
                {"left", graph.left().size()}, {"right", graph.right().size()},
                {"dual_vertices", dual_vertices}};
  j["phi"] = f.value;
  j["tau"] = t.value;
  j["min_cut_edges"] = f.min_cut.size();
  if (d) {
    j["duality"] = {{"flow_value", d->flow_value}, {"dual_weight", d->dual_weight},
                    {"equal", d->equal}, {"discrepancy", d->discrepancy}};
  } else {
    j["duality"] = {{"skipped", "InterleavedTerminals"}};
  }
  std::string extra;
  if (c.k) {
    const FlowResult fk = phi_kappa(graph, caps, *c.k, *c.theta_tilde);
    j["phi_kappa"] = {{"k", *c.k}, {"theta_tilde", *c.theta_tilde}, {"value", fk.value}};
    extra = " phi_kappa=" + report::format_double(fk.value);
  }
  if (dump_geometry) out.geometry = report::geometry(graph);
  out.summary = "phi=" + report::format_double(f.value) + " tau=" + report::format_double(t.value) +
                (d ? " dual=" + report::format_double(d->dual_weight) : " dual=skipped") + extra +
                (!d || d->equal ? "" : " (duality mismatch)");
  if (d && !d->equal) out.status = exit_code::runtime_error;
  return out;
}

inline RunOutput run_nu(const Config& c) {
  const NuEstimate est = estimate_nu(c.experiment());
  RunOutput out;
  out.report = {{"command", "nu"}};
  out.report.update(report::experiment_header(c));
  OrderedJson rows = OrderedJson::array();
  for (const Row& r : est.per_n) rows.push_back(report::summary_row(r));
  out.report["per_n"] = std::move(rows);
  out.report["extrapolated"] = est.extrapolated;
  out.report["ci95"] = {est.ci95.lo, est.ci95.hi};
  out.table = report::trajectory_table(est.per_n).str();
  out.summary = "nu_hat=" + report::format_double(est.extrapolated) + " ci95=[" +
                report::format_double(est.ci95.lo) + ", " + report::format_double(est.ci95.hi) + "]";
  return out;
}

inline RunOutput run_limit(const Config& c) {
  OrderedJson curve_json;
  const NuCurve curve = build_curve(c, curve_json);
  const double alpha = c.alpha ? *c.alpha : *c.rule.alpha();
  const LimitReport lr = limit_functional(c.theta, alpha, curve, c.grid_size);

  RunOutput out;
  OrderedJson& j = out.report;
  j["command"] = "limit";
  j["theta"] = lr.theta;
  j["alpha"] = lr.alpha;
  j["grid_size"] = c.grid_size;
  j["nu_curve"] = std::move(curve_json);
  j["eta_hat"] = lr.eta_hat;
  j["argmin_theta"] = lr.argmin_theta;
  j["nu_theta_hat"] = lr.nu_theta_hat;
  OrderedJson grid = OrderedJson::array();
  report::Csv csv({"angle", "nu", "ratio"});
  for (const GridPoint& p : lr.grid) {
    grid.push_back({{"angle", p.angle}, {"nu", p.nu}, {"ratio", report::number(p.ratio)}});
    csv.row(p.angle, p.nu, p.ratio);
  }
  j["grid"] = std::move(grid);
  out.table = csv.str();
  out.summary = "eta_hat=" + report::format_double(lr.eta_hat) +
                " argmin=" + report::format_double(lr.argmin_theta) +
                " nu_theta=" + report::format_double(lr.nu_theta_hat);
  return out;
}

inline RunOutput run_lln(const Config& c) {
  std::optional<NuCurve> curve;
  OrderedJson curve_json;
  if (c.nu_curve) curve = build_curve(c, curve_json);
  const TrajectoryReport tr = lln_trajectory(c.experiment(), c.observable, curve, c.grid_size);

  RunOutput out;
  out.report = {{"command", "lln"}, {"observable", to_string(tr.observable)}};
  out.report.update(report::experiment_header(c));
  if (c.nu_curve) out.report["nu_curve"] = std::move(curve_json);
  OrderedJson rows = OrderedJson::array();
  for (const Row& r : tr.rows) rows.push_back(report::summary_row(r));
  out.report["rows"] = std::move(rows);
  out.report["predicted_limit"] = {
      {"value", tr.predicted.value ? report::number(*tr.predicted.value) : OrderedJson(nullptr)},
      {"provenance", tr.predicted.provenance}};
  out.table = report::trajectory_table(tr.rows).str();
  out.summary = to_string(tr.observable) + " at n=" + std::to_string(tr.rows.back().n) + ": " +
                report::format_double(tr.rows.back().stats.mean) +
                (tr.predicted.value ? " (predicted " + report::format_double(*tr.predicted.value) + ")"
                                    : "");
  return out;
}

inline RunOutput run_deviation(const Config& c) {
  const DeviationReport dr = deviation_experiment(c.experiment(), c.eta);
  RunOutput out;
  out.report = {{"command", "deviation"}, {"eta", dr.eta}};
  out.report.update(report::experiment_header(c));
  OrderedJson rows = OrderedJson::array();
  report::Csv csv({"n", "h", "reps", "mean", "tail_count", "tail_probability"});
  for (const DeviationRow& r : dr.rows) {
    rows.push_back({{"n", r.n}, {"h", r.h}, {"reps", r.reps}, {"mean", r.mean},
                    {"tail_count", r.tail_count}, {"tail_probability", r.tail_probability}});
    csv.row(r.n, r.h, r.reps, r.mean, r.tail_count, r.tail_probability);
  }
  out.report["rows"] = std::move(rows);
  out.table = csv.str();
  out.summary = "tail probabilities:";
  for (const DeviationRow& r : dr.rows) {
    out.summary += " n=" + std::to_string(r.n) + ":" + report::format_double(r.tail_probability);
  }
  return out;
}

inline RunOutput run_selftest(const Config& c) {
  const std::uint64_t seed = c.seed == 0 ? 1 : c.seed;
  const SuiteResult oracle = oracle_suite(seed, c.oracle_count);
  const SuiteResult duality = duality_suite(seed, c.duality_count);
  const auto suite = [](const SuiteResult& s) {
    return OrderedJson{{"passed", s.passed}, {"total", s.total}, {"skipped", s.skipped},
                       {"failures", s.failures}};
  };
  RunOutput out;
  out.report = {{"command", "selftest"}, {"seed", seed}, {"oracle", suite(oracle)},
                {"duality", suite(duality)}};
  out.summary = "oracle: " + std::to_string(oracle.passed) + "/" + std::to_string(oracle.total) +
                ", duality: " + std::to_string(duality.passed) + "/" + std::to_string(duality.total);
  if (!oracle.ok() || !duality.ok()) out.status = exit_code::selftest_failure;
  return out;
}

}  // namespace detail

/// Runs one validated command; throws tiltflow::Error on failure.
inline RunOutput execute(const Config& c, bool dump_geometry = false) {
  switch (c.command) {
    case Command::Flow: return detail::run_flow(c, dump_geometry);
    case Command::Nu: return detail::run_nu(c);
    case Command::Limit: return detail::run_limit(c);
    case Command::Lln: return detail::run_lln(c);
    case Command::Deviation: return detail::run_deviation(c);
    case Command::Selftest: break;
  }
  return detail::run_selftest(c);
}

inline std::string error_record(const std::string& kind, const std::string& field,
                                const std::string& message) {
  OrderedJson j{{"error", kind}, {"field", field.empty() ? OrderedJson(nullptr) : OrderedJson(field)},
                {"message", message}};
  return j.dump();
}

struct Invocation {
  Command command = Command::Selftest;
  std::optional<std::string> config_path;
  std::vector<std::string> overrides;
  std::optional<std::string> out_dir;
  bool dump_geometry = false;
};

/// Parse, validate, compute, write. Returns the process exit status.
inline int run(const Invocation& inv, std::ostream& out, std::ostream& err) {
  Config cfg;
  try {
    Json doc = inv.config_path ? load_config_file(*inv.config_path) : Json::object();
    for (const std::string& s : inv.overrides) apply_override(doc, s);
    cfg = parse_config(inv.command, doc);
    if (inv.out_dir) cfg.output_dir = *inv.out_dir;
    validate_config(cfg);
  } catch (const FieldError& e) {
    err << error_record(std::string(to_string(e.kind())), e.field(), e.detail()) << "\n";
    return exit_code::config_error;
  } catch (const Error& e) {
    err << error_record(std::string(to_string(e.kind())), "", e.detail()) << "\n";
    return exit_code::config_error;
  }

  RunOutput result;
  try {
    result = execute(cfg, inv.dump_geometry);
  } catch (const Error& e) {
    err << error_record(std::string(to_string(e.kind())), "", e.detail()) << "\n";
    return exit_code::runtime_error;
  }

  try {
    namespace fs = std::filesystem;
    const fs::path dir(cfg.output_dir);
    fs::create_directories(dir);
    const std::string stem = to_string(cfg.command);
    const auto write = [&dir](const std::string& name, const std::string& text) {
      std::ofstream f(dir / name, std::ios::binary);
      f << text;
      if (!f) throw std::runtime_error("cannot write " + (dir / name).string());
    };
    write(stem + "_report.json", result.report.dump(2) + "\n");
    if (result.table) write(stem + "_table.csv", *result.table);
    if (result.geometry) write(stem + "_geometry.json", result.geometry->dump(2) + "\n");
  } catch (const std::exception& e) {
    err << error_record("IOError", "output_dir", e.what()) << "\n";
    return exit_code::runtime_error;
  }
  out << result.summary << "\n";
  return result.status;
}

}  // namespace tiltflow
