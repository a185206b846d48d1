#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "tiltflow/geometry.hpp"

using namespace tiltflow;
using std::numbers::pi;

namespace {

ErrorKind kind_of(const CylinderSpec& s) {
  try {
    validate(s);
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "spec was accepted";
  return ErrorKind::ConfigError;
}

}  // namespace

TEST(Spec, CenteredUnitSegmentIsOrthogonalAndOriented) {
  for (double theta : {0.0, 0.3, pi / 4, pi / 2, 2.5}) {
    const CylinderSpec s = CylinderSpec::centered_unit(theta, 5, 2.0);
    EXPECT_NO_THROW(validate(s));
    EXPECT_NEAR(s.basis_length(), 1.0, 1e-15);
    EXPECT_NEAR(dot(s.b - s.a, s.normal()), 0.0, 1e-15);
    EXPECT_GT(dot(s.b - s.a, s.perp()), 0.0);
    EXPECT_NEAR(s.scaled_length(), 5.0, 1e-12);
    // midpoint at the origin
    EXPECT_NEAR((s.a + s.b).x, 0.0, 1e-15);
    EXPECT_NEAR((s.a + s.b).y, 0.0, 1e-15);
  }
}

TEST(Spec, RejectsBadInput) {
  CylinderSpec s = CylinderSpec::centered_unit(0.3, 4, 2.0);
  s.theta = pi;
  EXPECT_EQ(kind_of(s), ErrorKind::InvalidSpec);
  s.theta = -0.1;
  EXPECT_EQ(kind_of(s), ErrorKind::InvalidSpec);

  s = CylinderSpec::centered_unit(0.3, 4, 2.0);
  std::swap(s.a, s.b);  // wrong orientation
  EXPECT_EQ(kind_of(s), ErrorKind::InvalidSpec);

  s = CylinderSpec::centered_unit(0.3, 4, 2.0);
  s.b = s.b + 1e-6 * s.normal();  // not orthogonal
  EXPECT_EQ(kind_of(s), ErrorKind::InvalidSpec);

  s = CylinderSpec::centered_unit(0.3, 4, 0.5);
  EXPECT_EQ(kind_of(s), ErrorKind::DegenerateCylinder);

  s = CylinderSpec::centered_unit(0.3, 1, 2.0);  // n l(A) = 1 < 2
  EXPECT_EQ(kind_of(s), ErrorKind::DegenerateCylinder);
}

TEST(Frame, LocalGlobalRoundTrip) {
  const CylinderSpec s = CylinderSpec::centered_unit(1.1, 7, 3.0);
  const CylinderFrame f(s);
  for (double along : {0.0, 1.5, 7.0}) {
    for (double height : {-3.0, 0.0, 2.2}) {
      const LocalCoords c = f.local(f.global({along, height}));
      EXPECT_NEAR(c.along, along, 1e-12);
      EXPECT_NEAR(c.height, height, 1e-12);
    }
  }
}

TEST(Frame, ClosedInclusionWithTolerance) {
  // axis-aligned: theta = pi/2, A horizontal, the box is [-2, 2] x [-1, 1]
  const CylinderFrame f(CylinderSpec::centered_unit(pi / 2, 4, 1.0));
  EXPECT_TRUE(f.contains({2.0, 1.0}));
  EXPECT_TRUE(f.contains({-2.0, -1.0}));
  EXPECT_TRUE(f.contains({2.0 + 5e-10, 0.0}));
  EXPECT_FALSE(f.contains({2.0 + 1e-6, 0.0}));
  EXPECT_FALSE(f.contains({0.0, -1.0 - 1e-6}));
}

TEST(Admissible, WindowFormula) {
  const CylinderSpec s = CylinderSpec::centered_unit(0.4, 10, 5.0);
  const AngleInterval w = admissible_window(s);
  EXPECT_NEAR(w.lo, 0.4 - std::atan(1.0), 1e-15);
  EXPECT_NEAR(w.hi, 0.4 + std::atan(1.0), 1e-15);

  // k = 0: chord starts at the bottom left corner and may only tilt up
  const AngleInterval k0 = admissible_angles(s, 0.0);
  EXPECT_NEAR(k0.lo, 0.4, 1e-15);
  EXPECT_NEAR(k0.hi, w.hi, 1e-15);
  const AngleInterval k1 = admissible_angles(s, 1.0);
  EXPECT_NEAR(k1.lo, w.lo, 1e-15);
  EXPECT_NEAR(k1.hi, 0.4, 1e-15);

  EXPECT_TRUE(is_admissible(s, 0.5, 0.4));
  EXPECT_TRUE(is_admissible(s, 0.0, w.hi));
  EXPECT_FALSE(is_admissible(s, 0.0, 0.4 - 0.01));
  EXPECT_FALSE(is_admissible(s, 1.2, 0.4));
}

TEST(Chord, EndPointsSitOnTheSides) {
  const CylinderSpec s = CylinderSpec::centered_unit(0.4, 10, 5.0);
  const CylinderFrame f(s);
  const double k = 0.3, tilt = 0.2;
  const Chord ch = chord_of(s, k, 0.4 + tilt);
  const LocalCoords c = f.local(ch.c), d = f.local(ch.d);
  EXPECT_NEAR(c.along, 0.0, 1e-12);
  EXPECT_NEAR(c.height, (2 * k - 1) * 5.0, 1e-12);
  EXPECT_NEAR(d.along, 10.0, 1e-12);
  EXPECT_NEAR(d.height, (2 * k - 1) * 5.0 + 10.0 * std::tan(tilt), 1e-12);
  // c d is orthogonal to the tilted normal
  EXPECT_NEAR(dot(ch.d - ch.c, ch.normal), 0.0, 1e-12);
}

TEST(Chord, RejectsInadmissible) {
  const CylinderSpec s = CylinderSpec::centered_unit(0.4, 10, 5.0);
  EXPECT_THROW(
      {
        try {
          chord_of(s, 0.0, 0.3);
        } catch (const Error& e) {
          EXPECT_EQ(e.kind(), ErrorKind::NotAdmissible);
          throw;
        }
      },
      Error);
}
