#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <set>

#include "support.hpp"
#include "tiltflow/duality.hpp"
#include "tiltflow/flow.hpp"
#include "tiltflow/oracle.hpp"

using namespace tiltflow;
using std::numbers::pi;

namespace {

const Distribution kTable = dist::DiscreteTable{{0.0, 1.0, 3.0}, {0.3, 0.4, 0.3}};

CapacityMap ones(const CylinderGraph& g) {
  return CapacityMap::from_units(std::vector<std::int64_t>(g.edge_count(), 1));
}

bool contains_all(std::span<const int> big, std::span<const int> small) {
  const std::set<int> s(big.begin(), big.end());
  for (int v : small) {
    if (!s.count(v)) return false;
  }
  return true;
}

}  // namespace

// Straight cylinder of three rows: the columns are disjoint top-bottom paths
// and the middle row of vertical edges is a cut of the same size. The basis
// [-m/2, m/2] holds m + 1 columns for even m and m for odd m.
TEST(Phi, StraightUnitCapacities) {
  for (int m = 2; m <= 4; ++m) {
    const CylinderGraph g = build_cylinder(CylinderSpec::centered_unit(pi / 2, m, 1.0));
    const CapacityMap caps = ones(g);
    const FlowResult f = phi(g, caps);
    EXPECT_EQ(*f.value_units, m % 2 == 0 ? m + 1 : m);
    ASSERT_LE(g.edge_count(), 24u);
    EXPECT_EQ(*f.value_units,
              brute_force_min_cut(g.vertex_count(), g.edges(), caps.units(), g.top(), g.bottom()));
  }
}

TEST(Phi, StraightUnitCapacitiesAtScale) {
  for (int n : {8, 16, 32}) {
    const CylinderGraph g = build_cylinder(CylinderSpec::centered_unit(pi / 2, n, n));
    const CapacityMap caps = ones(g);
    EXPECT_EQ(*phi(g, caps).value_units, n + 1);
    EXPECT_EQ(*tau(g, caps).value_units, n + 1);
  }
}

TEST(Phi, ZeroCapacitiesGiveZero) {
  prop::Draws d(41);
  for (int i = 0; i < 20; ++i) {
    const CylinderGraph g = build_cylinder(d.spec());
    const CapacityMap zero = CapacityMap::from_units(std::vector<std::int64_t>(g.edge_count(), 0));
    EXPECT_EQ(*phi(g, zero).value_units, 0);
    EXPECT_EQ(*tau(g, zero).value_units, 0);
  }
}

TEST(Phi, BoundedByTau) {
  prop::Draws d(42);
  for (int i = 0; i < 300; ++i) {
    const CylinderGraph g = build_cylinder(d.spec());
    const CapacityMap caps = sample(kTable, g.edge_count(), 42, i, CapacityMode::exact());
    ASSERT_LE(*phi(g, caps).value_units, *tau(g, caps).value_units) << "instance " << i;
  }
}

TEST(Phi, MonotoneInEachCapacity) {
  prop::Draws d(43);
  for (int i = 0; i < 100; ++i) {
    const CylinderGraph g = build_cylinder(d.spec(12, 10.0));
    const CapacityMap caps = sample(kTable, g.edge_count(), 43, i, CapacityMode::exact());
    const int e = d.below(static_cast<int>(g.edge_count()));
    const CapacityMap raised = caps.with_edge(e, caps.values()[e] + 1.0 + d.below(3));
    EXPECT_LE(*phi(g, caps).value_units, *phi(g, raised).value_units);
    EXPECT_LE(*tau(g, caps).value_units, *tau(g, raised).value_units);
  }
}

TEST(PhiKappa, ScalesLinearly) {
  prop::Draws d(44);
  for (int i = 0; i < 40; ++i) {
    const CylinderSpec s = d.spec();
    const CylinderGraph g = build_cylinder(s);
    const CapacityMap caps = sample(kTable, g.edge_count(), 44, i, CapacityMode::exact());
    const double k = d.uniform();
    const AngleInterval w = admissible_angles(s, k);
    const double tt = d.uniform(w.lo, w.hi);
    const auto base = *phi_kappa(g, caps, k, tt).value_units;
    EXPECT_EQ(*phi_kappa(g, caps.scaled(5), k, tt).value_units, 5 * base);
  }
}

// The flat condition through the centre is tau.
TEST(PhiKappa, FlatConditionIsTau) {
  prop::Draws d(45);
  for (int i = 0; i < 40; ++i) {
    const CylinderSpec s = d.spec();
    const CylinderGraph g = build_cylinder(s);
    const CapacityMap caps = sample(kTable, g.edge_count(), 45, i, CapacityMode::exact());
    EXPECT_EQ(*phi_kappa(g, caps, 0.5, s.theta).value_units, *tau(g, caps).value_units);
  }
}

// When the split puts the whole top in the upper part and the whole bottom in
// the lower part, every top-bottom path joins the two parts.
TEST(PhiKappa, DominatesPhiWhenTerminalsAreNested) {
  prop::Draws d(46);
  int nested = 0;
  for (int i = 0; i < 200; ++i) {
    const CylinderSpec s = d.spec();
    const CylinderGraph g = build_cylinder(s);
    const CapacityMap caps = sample(kTable, g.edge_count(), 46, i, CapacityMode::exact());
    for (int j = 0; j < 10; ++j) {
      const double k = d.uniform();
      const AngleInterval w = admissible_angles(s, k);
      const double tt = d.uniform(w.lo, w.hi);
      const BoundaryCondition bc = split_boundary(g, k, tt);
      if (!contains_all(bc.upper, g.top()) || !contains_all(bc.lower, g.bottom())) continue;
      ++nested;
      ASSERT_LE(*phi(g, caps).value_units, *phi_kappa(g, caps, k, tt).value_units);
    }
  }
  EXPECT_GT(nested, 500);
}

// The chord from a corner of the basis side can leave the lower part empty.
TEST(PhiKappa, CornerChordCanEmptyTheLowerPart) {
  const CylinderSpec s = CylinderSpec::centered_unit(pi / 2, 4, 1.0);
  const CylinderGraph g = build_cylinder(s);
  const BoundaryCondition bc = split_boundary(g, 0.0, s.theta);
  EXPECT_TRUE(bc.lower.empty());
  const CapacityMap caps = ones(g);
  EXPECT_EQ(*phi(g, caps).value_units, 5);
  EXPECT_EQ(*phi_kappa(g, caps, 0.0, s.theta).value_units, 0);
}

// For any admissible split the flow equals the cheapest dual path between
// the two outer-face gaps.
TEST(PhiKappa, MatchesSplitDualDistance) {
  prop::Draws d(47);
  int checked = 0;
  for (int i = 0; i < 150; ++i) {
    const CylinderSpec s = d.spec();
    const CylinderGraph g = build_cylinder(s);
    const CapacityMap caps = sample(kTable, g.edge_count(), 47, i, CapacityMode::exact());
    const double steep = s.theta + std::atan(2.0 * s.height_h / s.scaled_length());
    for (const auto& [k, tt] : {std::pair{0.0, steep}, std::pair{d.uniform(), s.theta}}) {
      if (!is_admissible(s, k, tt)) continue;
      const BoundaryCondition bc = split_boundary(g, k, tt);
      if (bc.upper.empty() || bc.lower.empty()) continue;
      try {
        const DualPathResult p = dual_split_distance(g, caps, bc.upper, bc.lower);
        ASSERT_EQ(*phi_kappa(g, caps, k, tt).value_units, *p.weight_units) << "instance " << i;
        ++checked;
      } catch (const Error& e) {
        ASSERT_EQ(e.kind(), ErrorKind::InterleavedTerminals);
      }
    }
  }
  EXPECT_GT(checked, 100);
}
