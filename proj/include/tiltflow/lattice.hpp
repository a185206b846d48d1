#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <compare>
#include <cstdint>
#include <span>
#include <vector>

#include "tiltflow/error.hpp"
#include "tiltflow/geometry.hpp"

namespace tiltflow {

struct LatticePoint {
  int x = 0;
  int y = 0;

  friend constexpr auto operator<=>(const LatticePoint&, const LatticePoint&) = default;
  Vec2 as_vec() const { return {static_cast<double>(x), static_cast<double>(y)}; }
};

/// Undirected lattice edge between vertex indices; `u` precedes `v` in the
/// lexicographic vertex order.
struct LatticeEdge {
  int u = 0;
  int v = 0;
};

// Unit steps in clockwise order: east, south, west, north.
inline constexpr std::array<LatticePoint, 4> kSteps{{{1, 0}, {0, -1}, {-1, 0}, {0, 1}}};

/// A dart is an oriented edge: dart 2e runs u -> v, dart 2e + 1 runs v -> u.
constexpr int dart_of(int edge, bool reversed) { return 2 * edge + (reversed ? 1 : 0); }
constexpr int edge_of_dart(int dart) { return dart >> 1; }

/// Piece of the outer face cut off by the edges that attach a super source
/// to every source and a super sink to every sink: the darts of the outer
/// walk between two consecutive terminal occurrences.
struct BoundaryRegion {
  enum class Kind {
    AfterSources,  // from the last source of the source run to the first sink
    AfterSinks,    // from the last sink of the sink run to the first source
    Pocket,        // between two terminals of the same run
  };
  Kind kind = Kind::Pocket;
  std::vector<int> darts;
};

struct BoundaryGaps {
  std::vector<int> after_sources;
  std::vector<int> after_sinks;
};

/// Induced subgraph of Z^2 on the closed cylinder, with its boundary vertex
/// sets and the clockwise walk around its outer face.
class CylinderGraph {
 public:
  const CylinderSpec& spec() const { return spec_; }
  const CylinderFrame& frame() const { return frame_; }

  std::size_t vertex_count() const { return vertices_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  std::span<const LatticePoint> vertices() const { return vertices_; }
  std::span<const LatticeEdge> edges() const { return edges_; }
  const LatticePoint& vertex(int i) const { return vertices_[static_cast<std::size_t>(i)]; }
  const LatticeEdge& edge(int e) const { return edges_[static_cast<std::size_t>(e)]; }

  std::span<const int> top() const { return top_; }
  std::span<const int> bottom() const { return bottom_; }
  std::span<const int> left() const { return left_; }
  std::span<const int> right() const { return right_; }
  /// Vertices having at least one lattice neighbour outside the cylinder.
  std::span<const int> outer_layer() const { return outer_layer_; }

  /// Index of a lattice point, or -1 when it lies outside the cylinder.
  int index_of(LatticePoint p) const {
    if (p.x < box_x0_ || p.y < box_y0_ || p.x >= box_x0_ + box_w_ || p.y >= box_y0_ + box_h_) {
      return -1;
    }
    return grid_[static_cast<std::size_t>(p.x - box_x0_) * static_cast<std::size_t>(box_h_) +
                 static_cast<std::size_t>(p.y - box_y0_)];
  }

  /// Edge leaving vertex `i` in direction kSteps[dir], or -1.
  int edge_towards(int i, int dir) const {
    return incident_[static_cast<std::size_t>(i)][static_cast<std::size_t>(dir)];
  }

  int dart_tail(int dart) const {
    const LatticeEdge& e = edge(edge_of_dart(dart));
    return (dart & 1) ? e.v : e.u;
  }
  int dart_head(int dart) const {
    const LatticeEdge& e = edge(edge_of_dart(dart));
    return (dart & 1) ? e.u : e.v;
  }

  /// Doubled coordinates of the centre of the unit face on the left of a dart.
  LatticePoint left_face2(int dart) const {
    const LatticePoint p = vertex(dart_tail(dart));
    const LatticePoint q = vertex(dart_head(dart));
    const int dx = q.x - p.x;
    const int dy = q.y - p.y;
    return {p.x + q.x - dy, p.y + q.y + dx};
  }

  /// True when all four corners of the unit face with doubled centre `c2` are
  /// cylinder vertices, i.e. the face is a bounded face of the graph.
  bool is_inner_face(LatticePoint c2) const {
    const int x0 = (c2.x - 1) / 2;
    const int y0 = (c2.y - 1) / 2;
    return index_of({x0, y0}) >= 0 && index_of({x0 + 1, y0}) >= 0 &&
           index_of({x0, y0 + 1}) >= 0 && index_of({x0 + 1, y0 + 1}) >= 0;
  }

  /// Darts of the outer face, clockwise.
  std::span<const int> outer_walk() const { return outer_walk_; }

  /// Outer-face darts between the bottom and top runs on the left side, and
  /// between the top and bottom runs on the right side. Both are empty when T
  /// and B interleave along the outer face.
  std::span<const int> left_gap() const { return left_gap_; }
  std::span<const int> right_gap() const { return right_gap_; }

  /// Splits the outer walk by two disjoint terminal sets. Throws
  /// InterleavedTerminals when the sets do not occupy two contiguous runs of
  /// the walk and NoDualTerminals when either set is absent from it.
  std::vector<BoundaryRegion> outer_regions(std::span<const int> sources,
                                            std::span<const int> sinks) const;

  BoundaryGaps gaps_between(std::span<const int> sources, std::span<const int> sinks) const {
    BoundaryGaps gaps;
    for (BoundaryRegion& r : outer_regions(sources, sinks)) {
      if (r.kind == BoundaryRegion::Kind::AfterSources) gaps.after_sources = std::move(r.darts);
      if (r.kind == BoundaryRegion::Kind::AfterSinks) gaps.after_sinks = std::move(r.darts);
    }
    return gaps;
  }

  friend CylinderGraph build_cylinder(const CylinderSpec& spec);

 private:
  explicit CylinderGraph(const CylinderSpec& spec) : spec_(spec), frame_(spec) {}

  void classify_boundary();
  void trace_outer_face();

  CylinderSpec spec_;
  CylinderFrame frame_;
  std::vector<LatticePoint> vertices_;
  std::vector<LatticeEdge> edges_;
  std::vector<std::array<int, 4>> incident_;
  std::vector<int> grid_;
  int box_x0_ = 0, box_y0_ = 0, box_w_ = 0, box_h_ = 0;
  std::vector<int> top_, bottom_, left_, right_, outer_layer_;
  std::vector<int> outer_walk_;
  std::vector<int> left_gap_, right_gap_;
};

namespace detail {

// Does the half-open segment [x, y[ meet the face {c = level, o in [lo, hi]}?
// Coordinates are oriented so that the cylinder lies on the side c <= level.
inline bool meets_face(double cx, double cy, double level, double ox, double oy, double lo,
                       double hi) {
  const auto within = [&](double o) { return o >= lo - tol::region && o <= hi + tol::region; };
  if (std::abs(cx - level) <= tol::region) return within(ox);
  if (cx > level || cy <= level + tol::region) return false;
  const double lambda = (level - cx) / (cy - cx);
  return within(ox + lambda * (oy - ox));
}

}  // namespace detail

inline void CylinderGraph::classify_boundary() {
  const double len = frame_.length();
  const double h = frame_.half_height();
  std::vector<char> in_top(vertices_.size()), in_bottom(vertices_.size()),
      in_left(vertices_.size()), in_right(vertices_.size());
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    const LatticePoint p = vertices_[i];
    const LocalCoords lx = frame_.local(p.as_vec());
    bool outer = false;
    for (const LatticePoint step : kSteps) {
      const LatticePoint q{p.x + step.x, p.y + step.y};
      if (index_of(q) >= 0) continue;
      outer = true;
      const LocalCoords ly = frame_.local(q.as_vec());
      in_top[i] |= detail::meets_face(lx.height, ly.height, h, lx.along, ly.along, 0.0, len);
      in_bottom[i] |= detail::meets_face(-lx.height, -ly.height, h, lx.along, ly.along, 0.0, len);
      in_right[i] |= detail::meets_face(lx.along, ly.along, len, lx.height, ly.height, -h, h);
      in_left[i] |= detail::meets_face(-lx.along, -ly.along, 0.0, lx.height, ly.height, -h, h);
    }
    const int idx = static_cast<int>(i);
    if (outer) outer_layer_.push_back(idx);
    if (in_top[i]) top_.push_back(idx);
    if (in_bottom[i]) bottom_.push_back(idx);
    if (in_left[i]) left_.push_back(idx);
    if (in_right[i]) right_.push_back(idx);
    if (in_top[i] && in_bottom[i]) {
      throw Error(ErrorKind::DegenerateCylinder, "a vertex lies on both the top and the bottom");
    }
  }
  if (top_.empty() || bottom_.empty()) {
    throw Error(ErrorKind::DegenerateCylinder, "empty top or bottom boundary");
  }
}

inline void CylinderGraph::trace_outer_face() {
  const int dart_count = static_cast<int>(2 * edges_.size());
  std::vector<char> outer(static_cast<std::size_t>(dart_count));
  int outer_count = 0;
  int start = -1;
  for (int d = 0; d < dart_count; ++d) {
    outer[static_cast<std::size_t>(d)] = !is_inner_face(left_face2(d));
    if (outer[static_cast<std::size_t>(d)]) {
      ++outer_count;
      if (start < 0) start = d;
    }
  }
  if (start < 0) throw Error(ErrorKind::DegenerateCylinder, "cylinder graph has no edges");

  const auto direction_of = [this](int dart) {
    const LatticePoint p = vertex(dart_tail(dart));
    const LatticePoint q = vertex(dart_head(dart));
    for (int k = 0; k < 4; ++k) {
      if (q.x - p.x == kSteps[static_cast<std::size_t>(k)].x &&
          q.y - p.y == kSteps[static_cast<std::size_t>(k)].y) {
        return k;
      }
    }
    return -1;
  };

  // With the face kept on the left, the next dart leaves the head vertex along
  // the first edge clockwise from the way back.
  int d = start;
  do {
    outer_walk_.push_back(d);
    if (static_cast<int>(outer_walk_.size()) > outer_count) break;
    const int head = dart_head(d);
    const int back = (direction_of(d) + 2) % 4;
    for (int turn = 1; turn <= 4; ++turn) {
      const int dir = (back + turn) % 4;
      const int e = edge_towards(head, dir);
      if (e < 0) continue;
      d = dart_of(e, edges_[static_cast<std::size_t>(e)].u != head);
      break;
    }
  } while (d != start);

  if (static_cast<int>(outer_walk_.size()) != outer_count) {
    throw Error(ErrorKind::DegenerateCylinder, "cylinder graph is not connected");
  }
}

inline std::vector<BoundaryRegion> CylinderGraph::outer_regions(std::span<const int> sources,
                                                               std::span<const int> sinks) const {
  enum : char { kNone = 0, kSource = 1, kSink = 2 };
  std::vector<char> label(vertices_.size(), kNone);
  for (int s : sources) label[static_cast<std::size_t>(s)] = kSource;
  for (int z : sinks) {
    if (label[static_cast<std::size_t>(z)] == kSource) {
      throw Error(ErrorKind::OverlappingTerminals, "sources and sinks intersect");
    }
    label[static_cast<std::size_t>(z)] = kSink;
  }

  // Labelled positions of the walk, in walk order.
  std::vector<std::pair<std::size_t, char>> marks;
  std::vector<char> seen(vertices_.size(), 0);
  for (std::size_t i = 0; i < outer_walk_.size(); ++i) {
    const int v = dart_tail(outer_walk_[i]);
    seen[static_cast<std::size_t>(v)] = 1;
    if (label[static_cast<std::size_t>(v)] != kNone) {
      marks.emplace_back(i, label[static_cast<std::size_t>(v)]);
    }
  }
  for (std::size_t v = 0; v < vertices_.size(); ++v) {
    if (label[v] != kNone && !seen[v]) {
      throw Error(ErrorKind::InterleavedTerminals, "terminal vertex is not on the outer face");
    }
  }
  const auto count = [&](char what) {
    return std::count_if(marks.begin(), marks.end(), [what](const auto& m) { return m.second == what; });
  };
  if (count(kSource) == 0 || count(kSink) == 0) {
    throw Error(ErrorKind::NoDualTerminals, "a terminal set does not reach the outer face");
  }

  std::vector<BoundaryRegion> regions;
  std::size_t changes = 0;
  const std::size_t walk = outer_walk_.size();
  for (std::size_t j = 0; j < marks.size(); ++j) {
    const auto& here = marks[j];
    const auto& next = marks[(j + 1) % marks.size()];
    BoundaryRegion region;
    if (here.second != next.second) {
      ++changes;
      region.kind = here.second == kSource ? BoundaryRegion::Kind::AfterSources
                                           : BoundaryRegion::Kind::AfterSinks;
    }
    std::size_t pos = here.first;
    do {
      region.darts.push_back(outer_walk_[pos]);
      pos = (pos + 1) % walk;
    } while (pos != next.first);
    regions.push_back(std::move(region));
  }
  if (changes != 2) {
    throw Error(ErrorKind::InterleavedTerminals,
                "terminal sets alternate " + std::to_string(changes) + " times along the boundary");
  }
  return regions;
}

/// Builds the induced lattice graph of the closed cylinder cyl(nA, h).
inline CylinderGraph build_cylinder(const CylinderSpec& spec) {
  validate(spec);
  CylinderGraph g(spec);
  const CylinderFrame& frame = g.frame_;

  const double len = frame.length();
  const double h = frame.half_height();
  double x_lo = INFINITY, x_hi = -INFINITY, y_lo = INFINITY, y_hi = -INFINITY;
  for (const LocalCoords corner : {LocalCoords{0, -h}, LocalCoords{0, h}, LocalCoords{len, -h},
                                   LocalCoords{len, h}}) {
    const Vec2 p = frame.global(corner);
    x_lo = std::min(x_lo, p.x);
    x_hi = std::max(x_hi, p.x);
    y_lo = std::min(y_lo, p.y);
    y_hi = std::max(y_hi, p.y);
  }
  g.box_x0_ = static_cast<int>(std::floor(x_lo)) - 1;
  g.box_y0_ = static_cast<int>(std::floor(y_lo)) - 1;
  g.box_w_ = static_cast<int>(std::ceil(x_hi)) + 2 - g.box_x0_;
  g.box_h_ = static_cast<int>(std::ceil(y_hi)) + 2 - g.box_y0_;
  g.grid_.assign(static_cast<std::size_t>(g.box_w_) * static_cast<std::size_t>(g.box_h_), -1);

  for (int x = g.box_x0_; x < g.box_x0_ + g.box_w_; ++x) {
    for (int y = g.box_y0_; y < g.box_y0_ + g.box_h_; ++y) {
      if (!frame.contains({static_cast<double>(x), static_cast<double>(y)})) continue;
      g.grid_[static_cast<std::size_t>(x - g.box_x0_) * static_cast<std::size_t>(g.box_h_) +
              static_cast<std::size_t>(y - g.box_y0_)] = static_cast<int>(g.vertices_.size());
      g.vertices_.push_back({x, y});
    }
  }
  if (g.vertices_.empty()) {
    throw Error(ErrorKind::DegenerateCylinder, "no lattice vertex inside the cylinder");
  }

  g.incident_.assign(g.vertices_.size(), {-1, -1, -1, -1});
  for (std::size_t i = 0; i < g.vertices_.size(); ++i) {
    const LatticePoint p = g.vertices_[i];
    // North before east keeps edges sorted by (u, v).
    for (const int dir : {3, 0}) {
      const LatticePoint step = kSteps[static_cast<std::size_t>(dir)];
      const int j = g.index_of({p.x + step.x, p.y + step.y});
      if (j < 0) continue;
      const int e = static_cast<int>(g.edges_.size());
      g.edges_.push_back({static_cast<int>(i), j});
      g.incident_[i][static_cast<std::size_t>(dir)] = e;
      g.incident_[static_cast<std::size_t>(j)][static_cast<std::size_t>((dir + 2) % 4)] = e;
    }
  }

  g.classify_boundary();
  g.trace_outer_face();

  // The walk is clockwise, so the right side follows the top run. Very thin
  // tilted cylinders can have T and B alternating along the walk; the flows
  // are still defined there, only the dual is not, and the gaps stay empty.
  try {
    BoundaryGaps gaps = g.gaps_between(g.top_, g.bottom_);
    if (gaps.after_sources.empty() || gaps.after_sinks.empty()) {
      throw Error(ErrorKind::DegenerateCylinder, "top and bottom do not split the boundary");
    }
    g.right_gap_ = std::move(gaps.after_sources);
    g.left_gap_ = std::move(gaps.after_sinks);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::InterleavedTerminals) throw;
  }
  return g;
}

/// An admissible boundary condition kappa = (k, theta_tilde) realised on a
/// cylinder graph: outer-layer vertices strictly on either side of the chord.
struct BoundaryCondition {
  double k = 0.5;
  double theta_tilde = 0.0;
  Chord chord;
  std::vector<int> upper;  // A1, on the side of the top face
  std::vector<int> lower;  // A2
};

inline BoundaryCondition split_boundary(const CylinderGraph& graph, double k, double theta_tilde) {
  BoundaryCondition bc{k, theta_tilde, chord_of(graph.spec(), k, theta_tilde), {}, {}};
  for (const int v : graph.outer_layer()) {
    const double side = dot(graph.vertex(v).as_vec() - bc.chord.c, bc.chord.normal);
    if (side > tol::chord_side) {
      bc.upper.push_back(v);
    } else if (side < -tol::chord_side) {
      bc.lower.push_back(v);
    }
  }
  return bc;
}

}  // namespace tiltflow
