#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <queue>
#include <span>
#include <string>
#include <vector>

#include "tiltflow/capacities.hpp"
#include "tiltflow/error.hpp"
#include "tiltflow/lattice.hpp"

namespace tiltflow {

/// Dinic's blocking-flow algorithm on a residual network with paired arcs
/// (arc a and a ^ 1 are mutual reverses). `Cap` is std::int64_t for exact
/// runs or double, in which case residuals at or below `eps` count as zero.
template <class Cap>
class Dinic {
 public:
  explicit Dinic(int vertex_count, Cap eps = Cap{})
      : adj_(static_cast<std::size_t>(vertex_count)),
        level_(static_cast<std::size_t>(vertex_count)),
        next_arc_(static_cast<std::size_t>(vertex_count)),
        eps_(eps) {}

  /// Undirected edge of capacity c: both orientations start at c.
  int add_edge(int u, int v, Cap c) { return add_arc_pair(u, v, c, c); }
  int add_arc(int u, int v, Cap c) { return add_arc_pair(u, v, c, Cap{}); }

  Cap residual(int arc) const { return arcs_[static_cast<std::size_t>(arc)].cap; }
  int head(int arc) const { return arcs_[static_cast<std::size_t>(arc)].to; }

  Cap run(int source, int sink) {
    Cap total{};
    while (build_levels(source, sink)) {
      std::fill(next_arc_.begin(), next_arc_.end(), 0);
      total += blocking_flow(source, sink);
    }
    return total;
  }

  /// Vertices reachable from `source` through arcs with positive residual.
  std::vector<char> reachable(int source) const {
    std::vector<char> seen(adj_.size(), 0);
    std::vector<int> stack{source};
    seen[static_cast<std::size_t>(source)] = 1;
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      for (const int a : adj_[static_cast<std::size_t>(u)]) {
        const Arc& arc = arcs_[static_cast<std::size_t>(a)];
        if (arc.cap > eps_ && !seen[static_cast<std::size_t>(arc.to)]) {
          seen[static_cast<std::size_t>(arc.to)] = 1;
          stack.push_back(arc.to);
        }
      }
    }
    return seen;
  }

 private:
  struct Arc {
    int to;
    Cap cap;
  };

  int add_arc_pair(int u, int v, Cap forward, Cap backward) {
    const int id = static_cast<int>(arcs_.size());
    arcs_.push_back({v, forward});
    arcs_.push_back({u, backward});
    adj_[static_cast<std::size_t>(u)].push_back(id);
    adj_[static_cast<std::size_t>(v)].push_back(id + 1);
    return id;
  }

  bool build_levels(int source, int sink) {
    std::fill(level_.begin(), level_.end(), -1);
    std::queue<int> queue;
    level_[static_cast<std::size_t>(source)] = 0;
    queue.push(source);
    while (!queue.empty()) {
      const int u = queue.front();
      queue.pop();
      for (const int a : adj_[static_cast<std::size_t>(u)]) {
        const Arc& arc = arcs_[static_cast<std::size_t>(a)];
        if (arc.cap > eps_ && level_[static_cast<std::size_t>(arc.to)] < 0) {
          level_[static_cast<std::size_t>(arc.to)] = level_[static_cast<std::size_t>(u)] + 1;
          queue.push(arc.to);
        }
      }
    }
    return level_[static_cast<std::size_t>(sink)] >= 0;
  }

  // Iterative depth-first search along level-increasing arcs; dead ends are
  // pruned by resetting their level.
  Cap blocking_flow(int source, int sink) {
    Cap pushed{};
    std::vector<int> path;
    int u = source;
    while (true) {
      if (u == sink) {
        Cap bottleneck = arcs_[static_cast<std::size_t>(path.front())].cap;
        for (const int a : path) bottleneck = std::min(bottleneck, arcs_[static_cast<std::size_t>(a)].cap);
        std::size_t cut_at = path.size();
        for (std::size_t i = 0; i < path.size(); ++i) {
          Arc& fwd = arcs_[static_cast<std::size_t>(path[i])];
          fwd.cap -= bottleneck;
          arcs_[static_cast<std::size_t>(path[i] ^ 1)].cap += bottleneck;
          if (fwd.cap <= eps_ && cut_at == path.size()) cut_at = i;
        }
        pushed += bottleneck;
        path.resize(cut_at);
        u = path.empty() ? source : arcs_[static_cast<std::size_t>(path.back())].to;
        continue;
      }
      auto& it = next_arc_[static_cast<std::size_t>(u)];
      const auto& out = adj_[static_cast<std::size_t>(u)];
      bool advanced = false;
      for (; it < out.size(); ++it) {
        const Arc& arc = arcs_[static_cast<std::size_t>(out[it])];
        if (arc.cap > eps_ &&
            level_[static_cast<std::size_t>(arc.to)] == level_[static_cast<std::size_t>(u)] + 1) {
          path.push_back(out[it]);
          u = arc.to;
          advanced = true;
          break;
        }
      }
      if (advanced) continue;
      if (u == source) break;
      level_[static_cast<std::size_t>(u)] = -1;
      path.pop_back();
      u = path.empty() ? source : arcs_[static_cast<std::size_t>(path.back())].to;
    }
    return pushed;
  }

  std::vector<Arc> arcs_;
  std::vector<std::vector<int>> adj_;
  std::vector<int> level_;
  std::vector<std::size_t> next_arc_;
  Cap eps_;
};

/// Maximal flow with its certificates.
struct FlowResult {
  double value = 0.0;
  std::optional<std::int64_t> value_units;  // exact mode only
  std::vector<double> edge_flow;            // signed amount along u -> v of each edge
  std::vector<int> min_cut;                 // edge indices, source side to sink side
  std::vector<int> source_side;             // vertices reachable in the final residual graph

  /// Flow along the oriented edge from -> other endpoint.
  double assignment(const LatticeEdge& e, int edge_index, int from) const {
    const double f = edge_flow[static_cast<std::size_t>(edge_index)];
    return from == e.u ? f : -f;
  }
};

namespace detail {

inline void check_terminals(std::size_t vertex_count, std::span<const int> sources,
                            std::span<const int> sinks) {
  std::vector<char> mark(vertex_count, 0);
  for (const int s : sources) {
    if (s < 0 || static_cast<std::size_t>(s) >= vertex_count) {
      throw Error(ErrorKind::PreconditionViolated, "source vertex out of range");
    }
    mark[static_cast<std::size_t>(s)] = 1;
  }
  for (const int z : sinks) {
    if (z < 0 || static_cast<std::size_t>(z) >= vertex_count) {
      throw Error(ErrorKind::PreconditionViolated, "sink vertex out of range");
    }
    if (mark[static_cast<std::size_t>(z)]) {
      throw Error(ErrorKind::OverlappingTerminals, "vertex " + std::to_string(z) + " is both source and sink");
    }
  }
}

template <class Cap>
FlowResult solve(std::size_t vertex_count, std::span<const LatticeEdge> edges,
                 std::span<const Cap> caps, std::span<const int> sources, std::span<const int> sinks,
                 Cap eps) {
  const int n = static_cast<int>(vertex_count);
  const int super_source = n;
  const int super_sink = n + 1;
  const Cap unbounded = std::accumulate(caps.begin(), caps.end(), Cap{}) + Cap{1};

  Dinic<Cap> net(n + 2, eps);
  std::vector<int> arc_of(edges.size());
  for (std::size_t e = 0; e < edges.size(); ++e) {
    arc_of[e] = net.add_edge(edges[e].u, edges[e].v, caps[e]);
  }
  std::vector<int> source_arcs;
  for (const int s : sources) source_arcs.push_back(net.add_arc(super_source, s, unbounded));
  for (const int z : sinks) net.add_arc(z, super_sink, unbounded);

  const Cap total = net.run(super_source, super_sink);

  FlowResult r;
  r.edge_flow.resize(edges.size());
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const Cap forward = (net.residual(arc_of[e] ^ 1) - net.residual(arc_of[e])) / Cap{2};
    r.edge_flow[e] = static_cast<double>(forward);
  }
  const std::vector<char> side = net.reachable(super_source);
  for (int v = 0; v < n; ++v) {
    if (side[static_cast<std::size_t>(v)]) r.source_side.push_back(v);
  }
  for (std::size_t e = 0; e < edges.size(); ++e) {
    if (side[static_cast<std::size_t>(edges[e].u)] != side[static_cast<std::size_t>(edges[e].v)]) {
      r.min_cut.push_back(static_cast<int>(e));
    }
  }
  if constexpr (std::is_integral_v<Cap>) {
    r.value_units = total;
  }
  r.value = static_cast<double>(total);
  return r;
}

}  // namespace detail

/// Maximal flow from `sources` to `sinks` on an arbitrary subgraph of Z^2
/// given by its edge list. Empty terminal sets give a zero flow.
inline FlowResult max_flow(std::size_t vertex_count, std::span<const LatticeEdge> edges,
                           const CapacityMap& caps, std::span<const int> sources,
                           std::span<const int> sinks) {
  if (caps.size() != edges.size()) {
    throw Error(ErrorKind::CapacityLengthMismatch,
                std::to_string(caps.size()) + " capacities for " + std::to_string(edges.size()) + " edges");
  }
  detail::check_terminals(vertex_count, sources, sinks);
  if (sources.empty() || sinks.empty()) {
    FlowResult r;
    r.edge_flow.assign(edges.size(), 0.0);
    if (caps.mode().is_exact()) r.value_units = 0;
    return r;
  }
  if (caps.mode().is_exact()) {
    FlowResult r = detail::solve<std::int64_t>(vertex_count, edges, caps.units(), sources, sinks, 0);
    const double scale = static_cast<double>(caps.mode().scale);
    r.value = static_cast<double>(*r.value_units) / scale;
    for (double& f : r.edge_flow) f /= scale;
    return r;
  }
  const double eps = 1e-12 * (1.0 + caps.total());
  return detail::solve<double>(vertex_count, edges, caps.values(), sources, sinks, eps);
}

inline FlowResult max_flow(const CylinderGraph& graph, const CapacityMap& caps,
                           std::span<const int> sources, std::span<const int> sinks) {
  return max_flow(graph.vertex_count(), graph.edges(), caps, sources, sinks);
}

/// Returns the violated FlowResult invariants (empty when the certificate is
/// valid): antisymmetry, node law, capacity constraints, value equal to the
/// cut capacity, and separation of the terminals by the cut.
inline std::vector<std::string> check_flow(std::size_t vertex_count,
                                           std::span<const LatticeEdge> edges,
                                           const CapacityMap& caps, std::span<const int> sources,
                                           std::span<const int> sinks, const FlowResult& r) {
  std::vector<std::string> issues;
  const bool exact = caps.mode().is_exact();
  const double tolerance = exact ? 1e-9 : 1e-6 * (1.0 + r.value);
  const auto close = [&](double x, double y) { return std::abs(x - y) <= tolerance; };

  std::vector<char> role(vertex_count, 0);
  for (const int s : sources) role[static_cast<std::size_t>(s)] = 1;
  for (const int z : sinks) role[static_cast<std::size_t>(z)] = 2;

  std::vector<double> net_out(vertex_count, 0.0);
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const double f = r.edge_flow[e];
    if (r.assignment(edges[e], static_cast<int>(e), edges[e].u) !=
        -r.assignment(edges[e], static_cast<int>(e), edges[e].v)) {
      issues.push_back("antisymmetry fails on edge " + std::to_string(e));
    }
    if (std::abs(f) > caps[e] + (exact ? 0.0 : tolerance)) {
      issues.push_back("capacity exceeded on edge " + std::to_string(e));
    }
    net_out[static_cast<std::size_t>(edges[e].u)] += f;
    net_out[static_cast<std::size_t>(edges[e].v)] -= f;
  }
  double out_of_sources = 0.0;
  for (std::size_t v = 0; v < vertex_count; ++v) {
    if (role[v] == 0 && !close(net_out[v], 0.0)) {
      issues.push_back("node law fails at vertex " + std::to_string(v));
    }
    if (role[v] == 1) out_of_sources += net_out[v];
  }
  if (!close(out_of_sources, r.value)) issues.push_back("net outflow of sources differs from value");

  double cut = 0.0;
  std::vector<char> removed(edges.size(), 0);
  for (const int e : r.min_cut) {
    cut += caps[static_cast<std::size_t>(e)];
    removed[static_cast<std::size_t>(e)] = 1;
  }
  if (!close(cut, r.value)) issues.push_back("cut capacity differs from flow value");

  std::vector<std::vector<int>> adj(vertex_count);
  for (std::size_t e = 0; e < edges.size(); ++e) {
    if (removed[e]) continue;
    adj[static_cast<std::size_t>(edges[e].u)].push_back(edges[e].v);
    adj[static_cast<std::size_t>(edges[e].v)].push_back(edges[e].u);
  }
  std::vector<char> seen(vertex_count, 0);
  std::vector<int> stack(sources.begin(), sources.end());
  for (const int s : sources) seen[static_cast<std::size_t>(s)] = 1;
  while (!stack.empty()) {
    const int u = stack.back();
    stack.pop_back();
    if (role[static_cast<std::size_t>(u)] == 2) {
      issues.push_back("cut does not separate sources from sinks");
      break;
    }
    for (const int w : adj[static_cast<std::size_t>(u)]) {
      if (!seen[static_cast<std::size_t>(w)]) {
        seen[static_cast<std::size_t>(w)] = 1;
        stack.push_back(w);
      }
    }
  }
  return issues;
}

inline std::vector<std::string> check_flow(const CylinderGraph& graph, const CapacityMap& caps,
                                           std::span<const int> sources, std::span<const int> sinks,
                                           const FlowResult& r) {
  return check_flow(graph.vertex_count(), graph.edges(), caps, sources, sinks, r);
}

}  // namespace tiltflow
