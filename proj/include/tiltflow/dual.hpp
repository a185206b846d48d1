#pragma once

#include <span>
#include <unordered_map>
#include <vector>

#include "tiltflow/lattice.hpp"

namespace tiltflow {

/// Vertex of the planar dual. Bounded faces of the cylinder graph are unit
/// squares and give one vertex each. The outer face, once cut by the edges
/// joining the terminals to a super source and a super sink, falls into
/// regions: each dart of the two gaps between the terminal runs keeps its own
/// port, and each pocket between two terminals of the same run is one vertex.
struct DualVertex {
  enum class Kind { Face, Port, Pocket };
  Kind kind = Kind::Face;
  LatticePoint center2;  // doubled centre of the (first) unit face, odd coordinates
  int dart = -1;         // outer-face dart of a port, first dart of a pocket

  Vec2 center() const { return {0.5 * center2.x, 0.5 * center2.y}; }
};

/// Dual edge i crosses primal edge i; `a` lies on the left of dart 2i and `b`
/// on the left of dart 2i + 1.
struct DualEdge {
  int a = 0;
  int b = 0;
};

class DualGraph {
 public:
  std::span<const DualVertex> vertices() const { return vertices_; }
  std::span<const DualEdge> edges() const { return edges_; }
  std::size_t vertex_count() const { return vertices_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  const DualVertex& vertex(int i) const { return vertices_[static_cast<std::size_t>(i)]; }
  const DualEdge& edge(int e) const { return edges_[static_cast<std::size_t>(e)]; }

  /// Ports of the gap following the sink run and of the gap following the
  /// source run. For the top/bottom dual these are the left and right sides.
  std::span<const int> left_star() const { return left_star_; }
  std::span<const int> right_star() const { return right_star_; }

  /// Dual edges (equivalently primal edge indices) touching a dual vertex.
  std::span<const int> incident(int v) const { return incident_[static_cast<std::size_t>(v)]; }

  int vertex_of_dart(int dart) const { return of_dart_[static_cast<std::size_t>(dart)]; }

  friend DualGraph build_dual(const CylinderGraph& graph, std::span<const int> sources,
                              std::span<const int> sinks);

 private:
  std::vector<DualVertex> vertices_;
  std::vector<DualEdge> edges_;
  std::vector<std::vector<int>> incident_;
  std::vector<int> of_dart_;
  std::vector<int> left_star_, right_star_;
};

/// Dual of the cylinder graph relative to a pair of boundary terminal sets.
inline DualGraph build_dual(const CylinderGraph& graph, std::span<const int> sources,
                            std::span<const int> sinks) {
  DualGraph dual;
  const std::size_t darts = 2 * graph.edge_count();
  dual.of_dart_.assign(darts, -1);

  const auto add_vertex = [&dual](DualVertex v) {
    dual.vertices_.push_back(v);
    return static_cast<int>(dual.vertices_.size() - 1);
  };

  for (const BoundaryRegion& region : graph.outer_regions(sources, sinks)) {
    if (region.kind == BoundaryRegion::Kind::Pocket) {
      const int id = add_vertex(
          {DualVertex::Kind::Pocket, graph.left_face2(region.darts.front()), region.darts.front()});
      for (const int d : region.darts) dual.of_dart_[static_cast<std::size_t>(d)] = id;
      continue;
    }
    std::vector<int>& star =
        region.kind == BoundaryRegion::Kind::AfterSinks ? dual.left_star_ : dual.right_star_;
    for (const int d : region.darts) {
      const int id = add_vertex({DualVertex::Kind::Port, graph.left_face2(d), d});
      dual.of_dart_[static_cast<std::size_t>(d)] = id;
      star.push_back(id);
    }
  }

  const auto key = [](LatticePoint c2) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(c2.x)) << 32) |
           static_cast<std::uint32_t>(c2.y);
  };
  std::unordered_map<std::uint64_t, int> faces;
  for (std::size_t d = 0; d < darts; ++d) {
    if (dual.of_dart_[d] >= 0) continue;
    const LatticePoint c2 = graph.left_face2(static_cast<int>(d));
    auto [it, fresh] = faces.try_emplace(key(c2), static_cast<int>(dual.vertices_.size()));
    if (fresh) add_vertex({DualVertex::Kind::Face, c2, -1});
    dual.of_dart_[d] = it->second;
  }

  dual.incident_.resize(dual.vertices_.size());
  dual.edges_.reserve(graph.edge_count());
  for (std::size_t e = 0; e < graph.edge_count(); ++e) {
    const DualEdge de{dual.of_dart_[2 * e], dual.of_dart_[2 * e + 1]};
    dual.edges_.push_back(de);
    dual.incident_[static_cast<std::size_t>(de.a)].push_back(static_cast<int>(e));
    if (de.b != de.a) dual.incident_[static_cast<std::size_t>(de.b)].push_back(static_cast<int>(e));
  }
  return dual;
}

/// Dual whose left*/right* separate the top from the bottom.
inline DualGraph build_dual(const CylinderGraph& graph) {
  return build_dual(graph, graph.top(), graph.bottom());
}

}  // namespace tiltflow
