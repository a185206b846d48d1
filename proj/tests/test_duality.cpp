#include <gtest/gtest.h>

#include <algorithm>
#include <numbers>
#include <set>

#include "support.hpp"
#include "tiltflow/duality.hpp"
#include "tiltflow/selftest.hpp"

using namespace tiltflow;
using std::numbers::pi;

namespace {

const Distribution kTable = dist::DiscreteTable{{0.0, 1.0, 3.0}, {0.3, 0.4, 0.3}};

// True when removing `cut` leaves no path from top to bottom.
bool separates(const CylinderGraph& g, const std::vector<int>& cut) {
  const std::set<int> removed(cut.begin(), cut.end());
  std::vector<std::vector<int>> adj(g.vertex_count());
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    if (removed.count(static_cast<int>(e))) continue;
    adj[g.edge(static_cast<int>(e)).u].push_back(g.edge(static_cast<int>(e)).v);
    adj[g.edge(static_cast<int>(e)).v].push_back(g.edge(static_cast<int>(e)).u);
  }
  std::vector<char> seen(g.vertex_count(), 0);
  std::vector<int> stack(g.top().begin(), g.top().end());
  for (int v : stack) seen[v] = 1;
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    for (int w : adj[v]) {
      if (!seen[w]) {
        seen[w] = 1;
        stack.push_back(w);
      }
    }
  }
  return std::none_of(g.bottom().begin(), g.bottom().end(), [&](int v) { return seen[v]; });
}

}  // namespace

TEST(Duality, SuiteOfRandomInstances) {
  const SuiteResult r = duality_suite(1, 500);
  EXPECT_EQ(r.total, 500);
  EXPECT_EQ(r.passed, 500) << (r.failures.empty() ? "" : r.failures.front());
}

TEST(Duality, StraightUnitCylinder) {
  const CylinderGraph g = build_cylinder(CylinderSpec::centered_unit(pi / 2, 10, 5.0));
  const CapacityMap caps = CapacityMap::from_units(std::vector<std::int64_t>(g.edge_count(), 1));
  const DualityReport rep = verify_duality(g, build_dual(g), caps);
  EXPECT_TRUE(rep.equal);
  EXPECT_DOUBLE_EQ(rep.flow_value, 11.0);
  EXPECT_DOUBLE_EQ(rep.dual_weight, 11.0);
}

TEST(Duality, PathCrossesACut) {
  prop::Draws d(51);
  for (int i = 0; i < 100; ++i) {
    const CylinderGraph g = build_cylinder(d.spec());
    const CapacityMap caps = sample(kTable, g.edge_count(), 51, i, CapacityMode::exact());
    const DualGraph dual = build_dual(g);
    const DualPathResult p = dual_shortest_path(dual, caps);
    std::int64_t sum = 0;
    for (int e : p.crossed_edges) sum += caps.units()[e];
    EXPECT_EQ(sum, *p.weight_units);
    EXPECT_EQ(p.path.size(), p.crossed_edges.size() + 1);
    EXPECT_TRUE(separates(g, p.crossed_edges)) << "instance " << i;
  }
}

TEST(Duality, RealCapacities) {
  prop::Draws d(52);
  for (int i = 0; i < 100; ++i) {
    const CylinderSpec s = d.spec();
    const CylinderGraph g = build_cylinder(s);
    const CapacityMap caps = sample(dist::Exponential{1.0}, g.edge_count(), 52, i, CapacityMode::real());
    const DualityReport rep = verify_duality(g, build_dual(g), caps);
    EXPECT_TRUE(rep.equal) << rep.flow_value << " vs " << rep.dual_weight;
    EXPECT_NEAR(rep.flow_value, rep.dual_weight, 1e-6 * (1.0 + rep.flow_value));
  }
}

TEST(Duality, PairTableMinimumIsTheDistance) {
  prop::Draws d(53);
  for (int i = 0; i < 40; ++i) {
    const CylinderGraph g = build_cylinder(d.spec(12, 8.0));
    const CapacityMap caps = sample(kTable, g.edge_count(), 53, i, CapacityMode::exact());
    const DualGraph dual = build_dual(g);
    const auto table = enumerate_boundary_pair_distances(dual, caps);
    EXPECT_EQ(table.size(), dual.left_star().size() * dual.right_star().size());
    double best = INFINITY;
    for (const PairDistance& pd : table) best = std::min(best, pd.distance);
    EXPECT_DOUBLE_EQ(best, dual_shortest_path(dual, caps).weight);
  }
}

TEST(Duality, ZeroCapacities) {
  const CylinderSpec s = CylinderSpec::centered_unit(1.1, 9, 4.0);
  const CylinderGraph g = build_cylinder(s);
  const CapacityMap zero = CapacityMap::from_units(std::vector<std::int64_t>(g.edge_count(), 0));
  const DualityReport rep = verify_duality(s, zero);
  EXPECT_TRUE(rep.equal);
  EXPECT_EQ(rep.dual_weight, 0.0);
}

TEST(Duality, MismatchedCapacities) {
  const CylinderGraph g = build_cylinder(CylinderSpec::centered_unit(1.1, 9, 4.0));
  try {
    dual_shortest_path(build_dual(g), CapacityMap::from_units({1, 2, 3}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::CapacityLengthMismatch);
  }
}
