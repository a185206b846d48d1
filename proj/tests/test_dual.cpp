#include <gtest/gtest.h>

#include <numbers>
#include <set>

#include "support.hpp"
#include "tiltflow/dual.hpp"
#include "tiltflow/maxflow.hpp"

using namespace tiltflow;
using std::numbers::pi;

TEST(Dual, ThreeByThreeBlock) {
  const CylinderGraph g = build_cylinder(CylinderSpec::centered_unit(pi / 2, 2, 1.0));
  const DualGraph d = build_dual(g);
  EXPECT_EQ(d.edge_count(), 12u);
  int faces = 0, ports = 0, pockets = 0;
  for (const DualVertex& v : d.vertices()) {
    faces += v.kind == DualVertex::Kind::Face;
    ports += v.kind == DualVertex::Kind::Port;
    pockets += v.kind == DualVertex::Kind::Pocket;
  }
  EXPECT_EQ(faces, 4);
  // top row y = 1 and bottom row y = -1: the two sides keep two darts each,
  // and each terminal row encloses two pockets
  EXPECT_EQ(ports, 4);
  EXPECT_EQ(pockets, 4);
  EXPECT_EQ(d.left_star().size(), 2u);
  EXPECT_EQ(d.right_star().size(), 2u);
}

TEST(Dual, EveryDartHasAVertexAndFacesHaveDegreeFour) {
  prop::Draws draws(21);
  for (int i = 0; i < 80; ++i) {
    const CylinderGraph g = build_cylinder(draws.spec());
    const DualGraph d = build_dual(g);
    ASSERT_EQ(d.edge_count(), g.edge_count());
    for (int dart = 0; dart < static_cast<int>(2 * g.edge_count()); ++dart) {
      ASSERT_GE(d.vertex_of_dart(dart), 0);
    }
    for (int v = 0; v < static_cast<int>(d.vertex_count()); ++v) {
      if (d.vertex(v).kind == DualVertex::Kind::Face) {
        EXPECT_EQ(d.incident(v).size(), 4u);
        EXPECT_TRUE(g.is_inner_face(d.vertex(v).center2));
      } else if (d.vertex(v).kind == DualVertex::Kind::Port) {
        EXPECT_EQ(d.incident(v).size(), 1u);
      }
    }
    // an interior primal edge separates two distinct unit faces
    for (std::size_t e = 0; e < d.edge_count(); ++e) {
      const DualEdge& de = d.edge(static_cast<int>(e));
      if (d.vertex(de.a).kind == DualVertex::Kind::Face &&
          d.vertex(de.b).kind == DualVertex::Kind::Face) {
        EXPECT_NE(de.a, de.b);
      }
    }
    std::set<int> left(d.left_star().begin(), d.left_star().end());
    EXPECT_FALSE(left.empty());
    EXPECT_FALSE(d.right_star().empty());
    for (int v : d.right_star()) EXPECT_FALSE(left.count(v));
  }
}

TEST(Dual, StarsFollowTheSides) {
  // straight cylinder: left* sits on the side through a, right* on the side through b
  const CylinderSpec s = CylinderSpec::centered_unit(pi / 2, 6, 3.0);
  const CylinderGraph g = build_cylinder(s);
  const DualGraph d = build_dual(g);
  for (int v : d.left_star()) EXPECT_LT(d.vertex(v).center().x, 0.0);
  for (int v : d.right_star()) EXPECT_GT(d.vertex(v).center().x, 0.0);
}

TEST(Dual, RelabelledTerminalsMoveTheStars) {
  const CylinderGraph g = build_cylinder(CylinderSpec::centered_unit(pi / 2, 6, 3.0));
  // sources and sinks swapped: the gaps trade places
  const DualGraph tb = build_dual(g);
  const DualGraph bt = build_dual(g, g.bottom(), g.top());
  ASSERT_EQ(tb.left_star().size(), bt.right_star().size());
  ASSERT_EQ(tb.right_star().size(), bt.left_star().size());
  for (std::size_t i = 0; i < tb.left_star().size(); ++i) {
    const int dart_tb = tb.vertex(tb.left_star()[i]).dart;
    bool found = false;
    for (int v : bt.right_star()) found |= bt.vertex(v).dart == dart_tb;
    EXPECT_TRUE(found);
  }
}

// Band of width 2 at a tilt: the lattice inside is a staircase whose top and
// bottom vertices alternate along the outer face. Flows exist, the dual does not.
TEST(Dual, InterleavedTerminalsOnAThinBand) {
  const CylinderGraph g = build_cylinder(CylinderSpec::centered_unit(0.6, 10, 1.0));
  EXPECT_TRUE(g.left_gap().empty());
  EXPECT_TRUE(g.right_gap().empty());
  try {
    build_dual(g);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InterleavedTerminals);
  }
  const CapacityMap caps = CapacityMap::from_units(std::vector<std::int64_t>(g.edge_count(), 1));
  const FlowResult f = max_flow(g, caps, g.top(), g.bottom());
  EXPECT_TRUE(check_flow(g, caps, g.top(), g.bottom(), f).empty());
  EXPECT_GT(*f.value_units, 0);
}
