#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "tiltflow/lattice.hpp"

namespace tiltflow {

/// Minimum total capacity of an edge set whose removal leaves no path from
/// any source to any sink, by trying all 2^|E| subsets. Only for tiny graphs.
inline std::int64_t brute_force_min_cut(std::size_t vertex_count, std::span<const LatticeEdge> edges,
                                        std::span<const std::int64_t> caps,
                                        std::span<const int> sources, std::span<const int> sinks) {
  if (edges.size() > 24) throw std::invalid_argument("brute force limited to 24 edges");
  std::vector<char> is_sink(vertex_count, 0);
  for (const int t : sinks) is_sink[static_cast<std::size_t>(t)] = 1;

  std::int64_t best = std::numeric_limits<std::int64_t>::max();
  std::vector<char> seen(vertex_count);
  std::vector<int> stack;
  const std::uint32_t subsets = 1u << edges.size();
  for (std::uint32_t removed = 0; removed < subsets; ++removed) {
    std::int64_t cost = 0;
    for (std::size_t e = 0; e < edges.size(); ++e) {
      if (removed >> e & 1u) cost += caps[e];
    }
    if (cost >= best) continue;

    std::fill(seen.begin(), seen.end(), 0);
    stack.clear();
    for (const int s : sources) {
      seen[static_cast<std::size_t>(s)] = 1;
      stack.push_back(s);
    }
    bool connected = false;
    while (!stack.empty() && !connected) {
      const int u = stack.back();
      stack.pop_back();
      if (is_sink[static_cast<std::size_t>(u)]) connected = true;
      for (std::size_t e = 0; e < edges.size() && !connected; ++e) {
        if (removed >> e & 1u) continue;
        int w = -1;
        if (edges[e].u == u) w = edges[e].v;
        if (edges[e].v == u) w = edges[e].u;
        if (w >= 0 && !seen[static_cast<std::size_t>(w)]) {
          seen[static_cast<std::size_t>(w)] = 1;
          stack.push_back(w);
        }
      }
    }
    if (!connected) best = cost;
  }
  return best;
}

}  // namespace tiltflow
