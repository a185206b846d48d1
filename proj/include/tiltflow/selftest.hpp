#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "tiltflow/duality.hpp"
#include "tiltflow/oracle.hpp"

namespace tiltflow {

struct SuiteResult {
  int passed = 0;
  int total = 0;
  int skipped = 0;                    // draws rejected as degenerate and redrawn
  std::vector<std::string> failures;  // first few, for diagnostics

  bool ok() const { return passed == total; }
};

namespace detail {

// Instance parameters come from the same counter-based generator as the
// capacities, so suites are identical on every platform.
class ParamStream {
 public:
  ParamStream(std::uint64_t seed, std::uint64_t instance) : seed_(seed), instance_(instance) {}
  double uniform() { return edge_uniform(seed_, instance_ | (1ull << 63), next_++); }
  int below(int bound) { return std::min(bound - 1, static_cast<int>(uniform() * bound)); }

 private:
  std::uint64_t seed_, instance_, next_ = 0;
};

inline void note_failure(SuiteResult& r, std::string what) {
  if (r.failures.size() < 5) r.failures.push_back(std::move(what));
}

struct SmallGraph {
  std::size_t vertex_count = 0;
  std::vector<LatticeEdge> edges;
  std::vector<int> sources, sinks;
};

inline SmallGraph random_small_graph(ParamStream& ps) {
  SmallGraph g;
  const int v = 4 + ps.below(5);
  g.vertex_count = static_cast<std::size_t>(v);
  const int m = v - 1 + ps.below(15 - v + 1);
  for (int e = 0; e < m; ++e) {
    const int a = ps.below(v);
    int b = ps.below(v - 1);
    if (b >= a) ++b;
    g.edges.push_back({a, b});
  }
  const int s = ps.below(v);
  int t = ps.below(v - 1);
  if (t >= s) ++t;
  g.sources = {s};
  g.sinks = {t};
  // sometimes a second terminal on each side
  const int s2 = ps.below(v), t2 = ps.below(v);
  if (s2 != t && s2 != t2 && s2 != s) g.sources.push_back(s2);
  if (t2 != s && t2 != s2 && t2 != t) g.sinks.push_back(t2);
  return g;
}

// Small cylinders first; graphs over 14 edges fall back to a random graph.
inline SmallGraph oracle_instance(ParamStream& ps, bool cylinder) {
  if (cylinder) {
    const double theta = ps.uniform() * std::numbers::pi;
    const int n = 2 + ps.below(2);
    const double h = 1.0 + 0.8 * ps.uniform();
    try {
      const CylinderGraph c = build_cylinder(CylinderSpec::centered_unit(theta, n, h));
      if (c.edge_count() <= 14) {
        return {c.vertex_count(), {c.edges().begin(), c.edges().end()},
                {c.top().begin(), c.top().end()}, {c.bottom().begin(), c.bottom().end()}};
      }
    } catch (const Error&) {
    }
  }
  return random_small_graph(ps);
}

}  // namespace detail

/// Dinic against exhaustive cut enumeration on graphs with at most 14 edges
/// and integer capacities 0..5.
inline SuiteResult oracle_suite(std::uint64_t seed = 1, int count = 200) {
  SuiteResult r;
  for (int i = 0; i < count; ++i) {
    detail::ParamStream ps(seed, static_cast<std::uint64_t>(i));
    const detail::SmallGraph g = detail::oracle_instance(ps, i % 2 == 0);
    std::vector<std::int64_t> units(g.edges.size());
    for (auto& u : units) u = ps.below(6);
    const CapacityMap caps = CapacityMap::from_units(units);
    const FlowResult f = max_flow(g.vertex_count, g.edges, caps, g.sources, g.sinks);
    const std::int64_t cut = brute_force_min_cut(g.vertex_count, g.edges, units, g.sources, g.sinks);
    const auto issues = check_flow(g.vertex_count, g.edges, caps, g.sources, g.sinks, f);
    ++r.total;
    if (*f.value_units == cut && issues.empty()) {
      ++r.passed;
    } else {
      detail::note_failure(r, "oracle instance " + std::to_string(i) + ": flow " +
                                  std::to_string(*f.value_units) + ", cut " + std::to_string(cut) +
                                  (issues.empty() ? "" : ", " + issues.front()));
    }
  }
  return r;
}

/// Top-to-bottom max flow against the left*-to-right* dual distance on random
/// cylinders (n <= 20, h <= 20, theta uniform) with integer capacity laws.
inline SuiteResult duality_suite(std::uint64_t seed = 1, int count = 500) {
  SuiteResult r;
  for (std::uint64_t draw = 0; r.total < count; ++draw) {
    detail::ParamStream ps(seed, draw);
    const double theta = ps.uniform() * std::numbers::pi;
    const int n = 2 + ps.below(19);
    const double h = 1.0 + 19.0 * ps.uniform();
    const Distribution laws[] = {dist::Dirac{1.0}, dist::Bernoulli{0.6, 2.0},
                                 dist::DiscreteTable{{0.0, 1.0, 3.0}, {0.3, 0.4, 0.3}}};
    const Distribution& law = laws[ps.below(3)];
    const CylinderSpec spec = CylinderSpec::centered_unit(theta, n, h);
    try {
      const CylinderGraph graph = build_cylinder(spec);
      const CapacityMap caps = sample(law, graph.edge_count(), seed, draw, CapacityMode::exact());
      const DualityReport rep = verify_duality(graph, build_dual(graph), caps);
      ++r.total;
      if (rep.equal) {
        ++r.passed;
      } else {
        detail::note_failure(r, "duality draw " + std::to_string(draw) + ": flow " +
                                    std::to_string(rep.flow_value) + ", dual " +
                                    std::to_string(rep.dual_weight));
      }
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::DegenerateCylinder && e.kind() != ErrorKind::InterleavedTerminals) throw;
      ++r.skipped;
    }
  }
  return r;
}

}  // namespace tiltflow
