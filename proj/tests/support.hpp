#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>

#include "tiltflow/capacities.hpp"
#include "tiltflow/geometry.hpp"
#include "tiltflow/lattice.hpp"

namespace tiltflow::prop {

// Portable draws for property tests, taken from the capacity generator on a
// stream id no capacity map uses.
class Draws {
 public:
  explicit Draws(std::uint64_t seed) : seed_(seed) {}
  double uniform() { return edge_uniform(seed_, 0xD1CEull << 40, next_++); }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  int below(int n) { return std::min(n - 1, static_cast<int>(uniform() * n)); }

  // Random centred spec in the sizes the acceptance criteria use, redrawn
  // until the lattice has disjoint nonempty top and bottom forming two runs
  // of the outer face (about one draw in a thousand is not).
  CylinderSpec spec(int max_n = 20, double max_h = 20.0) {
    for (;;) {
      const double theta = uniform() * std::numbers::pi;
      const int n = 2 + below(max_n - 1);
      const double h = uniform(1.0, max_h);
      const CylinderSpec s = CylinderSpec::centered_unit(theta, n, h);
      try {
        if (!build_cylinder(s).left_gap().empty()) return s;
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::DegenerateCylinder) throw;
      }
    }
  }

 private:
  std::uint64_t seed_;
  std::uint64_t next_ = 0;
};

}  // namespace tiltflow::prop
