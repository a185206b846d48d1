#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <queue>
#include <span>
#include <vector>

#include "tiltflow/capacities.hpp"
#include "tiltflow/dual.hpp"
#include "tiltflow/error.hpp"
#include "tiltflow/flow.hpp"

namespace tiltflow {

/// Minimum-weight dual path between two terminal sets of dual vertices.
struct DualPathResult {
  double weight = 0.0;
  std::optional<std::int64_t> weight_units;  // exact mode only
  std::vector<int> path;                     // dual vertices, first in the source set
  std::vector<int> crossed_edges;            // primal edge indices, one per path step
};

namespace detail {

template <class W>
struct DijkstraTree {
  std::vector<W> dist;
  std::vector<int> parent_edge;
  std::vector<char> done;
};

// Label-setting search from every vertex of `from` at distance zero.
template <class W>
DijkstraTree<W> dual_dijkstra(const DualGraph& dual, std::span<const W> weight,
                              std::span<const int> from) {
  constexpr W kInf = std::numeric_limits<W>::max();
  DijkstraTree<W> t{std::vector<W>(dual.vertex_count(), kInf),
                    std::vector<int>(dual.vertex_count(), -1),
                    std::vector<char>(dual.vertex_count(), 0)};
  using Item = std::pair<W, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  for (const int s : from) {
    t.dist[static_cast<std::size_t>(s)] = W{};
    heap.push({W{}, s});
  }
  while (!heap.empty()) {
    const auto [d, u] = heap.top();
    heap.pop();
    if (t.done[static_cast<std::size_t>(u)]) continue;
    t.done[static_cast<std::size_t>(u)] = 1;
    for (const int e : dual.incident(u)) {
      const DualEdge& de = dual.edge(e);
      const int w = de.a == u ? de.b : de.a;
      const W nd = d + weight[static_cast<std::size_t>(e)];
      if (nd < t.dist[static_cast<std::size_t>(w)]) {
        t.dist[static_cast<std::size_t>(w)] = nd;
        t.parent_edge[static_cast<std::size_t>(w)] = e;
        heap.push({nd, w});
      }
    }
  }
  return t;
}

// Removes cycles from a vertex sequence, keeping the last visit of a repeated vertex.
inline void erase_loops(std::vector<int>& path, std::vector<int>& edges) {
  std::vector<int> out_path, out_edges;
  std::vector<int> position;
  for (std::size_t i = 0; i < path.size(); ++i) {
    const int v = path[i];
    const auto it = std::find(out_path.begin(), out_path.end(), v);
    if (it != out_path.end()) {
      const auto keep = static_cast<std::size_t>(it - out_path.begin());
      out_path.resize(keep + 1);
      out_edges.resize(keep);
      continue;
    }
    if (i > 0) out_edges.push_back(edges[i - 1]);
    out_path.push_back(v);
  }
  path = std::move(out_path);
  edges = std::move(out_edges);
}

template <class W>
DualPathResult shortest_between(const DualGraph& dual, std::span<const W> weight,
                                std::span<const int> from, std::span<const int> to) {
  const DijkstraTree<W> t = dual_dijkstra<W>(dual, weight, from);
  int best = -1;
  for (const int v : to) {
    if (t.dist[static_cast<std::size_t>(v)] == std::numeric_limits<W>::max()) continue;
    if (best < 0 || t.dist[static_cast<std::size_t>(v)] < t.dist[static_cast<std::size_t>(best)]) best = v;
  }
  if (best < 0) throw Error(ErrorKind::NoDualTerminals, "dual terminals are not connected");

  DualPathResult r;
  std::vector<int> path{best};
  std::vector<int> edges;
  for (int v = best; t.parent_edge[static_cast<std::size_t>(v)] >= 0;) {
    const int e = t.parent_edge[static_cast<std::size_t>(v)];
    const DualEdge& de = dual.edge(e);
    v = de.a == v ? de.b : de.a;
    edges.push_back(e);
    path.push_back(v);
  }
  std::reverse(path.begin(), path.end());
  std::reverse(edges.begin(), edges.end());
  erase_loops(path, edges);
  r.path = std::move(path);
  r.crossed_edges = std::move(edges);
  if constexpr (std::is_integral_v<W>) {
    r.weight_units = t.dist[static_cast<std::size_t>(best)];
  }
  r.weight = static_cast<double>(t.dist[static_cast<std::size_t>(best)]);
  return r;
}

inline void require_match(const DualGraph& dual, const CapacityMap& caps) {
  if (caps.size() != dual.edge_count()) {
    throw Error(ErrorKind::CapacityLengthMismatch, "capacity map does not match the dual graph");
  }
}

}  // namespace detail

/// Cheapest dual path between two sets of ports. In exact mode the weight is
/// computed in integer units.
inline DualPathResult dual_distance(const DualGraph& dual, const CapacityMap& caps,
                                    std::span<const int> from, std::span<const int> to) {
  detail::require_match(dual, caps);
  if (from.empty() || to.empty()) {
    throw Error(ErrorKind::NoDualTerminals, "empty dual terminal set");
  }
  if (caps.mode().is_exact()) {
    DualPathResult r = detail::shortest_between<std::int64_t>(dual, caps.units(), from, to);
    r.weight = static_cast<double>(*r.weight_units) / static_cast<double>(caps.mode().scale);
    return r;
  }
  return detail::shortest_between<double>(dual, caps.values(), from, to);
}

/// Minimum-weight path from left* to right*; by planar duality its weight is
/// the top-to-bottom flow.
inline DualPathResult dual_shortest_path(const DualGraph& dual, const CapacityMap& caps) {
  return dual_distance(dual, caps, dual.left_star(), dual.right_star());
}

/// Dual counterpart of the flow between two boundary vertex sets: the cheapest
/// path between the two outer-face gaps separating them. Throws
/// InterleavedTerminals when the sets do not form two boundary runs.
inline DualPathResult dual_split_distance(const CylinderGraph& graph, const CapacityMap& caps,
                                          std::span<const int> sources,
                                          std::span<const int> sinks) {
  const DualGraph dual = build_dual(graph, sources, sinks);
  return dual_distance(dual, caps, dual.left_star(), dual.right_star());
}

struct PairDistance {
  int left = 0;   // vertex of left*
  int right = 0;  // vertex of right*
  double distance = 0.0;
};

/// All distances between left* and right* vertices, row-major by left*.
inline std::vector<PairDistance> enumerate_boundary_pair_distances(const DualGraph& dual,
                                                                   const CapacityMap& caps) {
  detail::require_match(dual, caps);
  if (dual.left_star().empty() || dual.right_star().empty()) {
    throw Error(ErrorKind::NoDualTerminals, "empty dual terminal set");
  }
  std::vector<PairDistance> table;
  table.reserve(dual.left_star().size() * dual.right_star().size());
  const auto fill = [&](auto tag, auto weights, double scale) {
    using W = decltype(tag);
    for (const int l : dual.left_star()) {
      const int single[] = {l};
      const auto tree = detail::dual_dijkstra<W>(dual, weights, single);
      for (const int r : dual.right_star()) {
        const W d = tree.dist[static_cast<std::size_t>(r)];
        table.push_back({l, r,
                         d == std::numeric_limits<W>::max() ? INFINITY
                                                            : static_cast<double>(d) / scale});
      }
    }
  };
  if (caps.mode().is_exact()) {
    fill(std::int64_t{}, caps.units(), static_cast<double>(caps.mode().scale));
  } else {
    fill(double{}, caps.values(), 1.0);
  }
  return table;
}

struct DualityReport {
  double flow_value = 0.0;
  double dual_weight = 0.0;
  bool equal = false;
  double discrepancy = 0.0;
};

/// Compares the top-to-bottom max flow with the dual left*-to-right* distance:
/// exact equality in integer mode, relative 1e-6 otherwise.
inline DualityReport verify_duality(const CylinderGraph& graph, const DualGraph& dual,
                                    const CapacityMap& caps) {
  const FlowResult flow = phi(graph, caps);
  const DualPathResult path = dual_shortest_path(dual, caps);
  DualityReport rep{flow.value, path.weight, false, std::abs(flow.value - path.weight)};
  if (caps.mode().is_exact()) {
    rep.equal = *flow.value_units == *path.weight_units;
  } else {
    rep.equal = rep.discrepancy <= 1e-6 * (1.0 + flow.value);
  }
  return rep;
}

inline DualityReport verify_duality(const CylinderSpec& spec, const CapacityMap& caps) {
  const CylinderGraph graph = build_cylinder(spec);
  return verify_duality(graph, build_dual(graph), caps);
}

}  // namespace tiltflow
