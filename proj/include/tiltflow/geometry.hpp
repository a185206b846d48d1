#pragma once

#include <cmath>
#include <numbers>
#include <string>

#include "tiltflow/error.hpp"

namespace tiltflow {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend constexpr Vec2 operator+(Vec2 p, Vec2 q) { return {p.x + q.x, p.y + q.y}; }
  friend constexpr Vec2 operator-(Vec2 p, Vec2 q) { return {p.x - q.x, p.y - q.y}; }
  friend constexpr Vec2 operator*(double s, Vec2 p) { return {s * p.x, s * p.y}; }
  friend constexpr bool operator==(Vec2, Vec2) = default;
};

constexpr double dot(Vec2 p, Vec2 q) { return p.x * q.x + p.y * q.y; }
inline double norm(Vec2 p) { return std::hypot(p.x, p.y); }

// Unit normal (cos t, sin t) and its clockwise perpendicular (sin t, -cos t).
inline Vec2 normal_of(double angle) { return {std::cos(angle), std::sin(angle)}; }
inline Vec2 perp_of(double angle) { return {std::sin(angle), -std::cos(angle)}; }

namespace tol {
inline constexpr double orthogonality = 1e-12;
inline constexpr double region = 1e-9;
inline constexpr double admissibility = 1e-9;
inline constexpr double chord_side = 1e-9;
}  // namespace tol

/// Continuous description of a tilted cylinder: the basis segment [a, b] is
/// scaled by `scale_n` and thickened by `height_h` on both sides along the
/// normal direction (cos theta, sin theta).
struct CylinderSpec {
  Vec2 a;
  Vec2 b;
  double theta = 0.0;
  int scale_n = 1;
  double height_h = 1.0;

  /// Unit-length basis centred at the origin, orthogonal to the normal at
  /// `theta`, oriented so that (b - a) points along perp_of(theta).
  static CylinderSpec centered_unit(double theta, int n, double h) {
    const Vec2 p = perp_of(theta);
    return {(-0.5) * p, 0.5 * p, theta, n, h};
  }

  double basis_length() const { return norm(b - a); }
  double scaled_length() const { return scale_n * basis_length(); }
  Vec2 normal() const { return normal_of(theta); }
  Vec2 perp() const { return perp_of(theta); }
  Vec2 scaled_a() const { return static_cast<double>(scale_n) * a; }
  Vec2 scaled_b() const { return static_cast<double>(scale_n) * b; }

  friend bool operator==(const CylinderSpec&, const CylinderSpec&) = default;
};

/// Throws InvalidSpec for violations of the orthogonality/orientation
/// invariants and DegenerateCylinder for geometrically valid but too small
/// cylinders (height below 1 or scaled basis shorter than 2).
inline void validate(const CylinderSpec& spec) {
  if (!std::isfinite(spec.theta) || spec.theta < 0.0 || spec.theta >= std::numbers::pi) {
    throw Error(ErrorKind::InvalidSpec, "theta must lie in [0, pi)");
  }
  const Vec2 ab = spec.b - spec.a;
  if (!(norm(ab) > 0.0)) throw Error(ErrorKind::InvalidSpec, "basis segment has zero length");
  if (std::abs(dot(ab, spec.normal())) > tol::orthogonality) {
    throw Error(ErrorKind::InvalidSpec, "basis segment is not orthogonal to the normal");
  }
  if (!(dot(ab, spec.perp()) > 0.0)) {
    throw Error(ErrorKind::InvalidSpec, "basis orientation requires (b - a).perp(theta) > 0");
  }
  if (spec.scale_n < 1) throw Error(ErrorKind::InvalidSpec, "scale_n must be >= 1");
  if (!std::isfinite(spec.height_h) || !(spec.height_h > 0.0)) {
    throw Error(ErrorKind::InvalidSpec, "height_h must be positive");
  }
  if (spec.height_h < 1.0) {
    throw Error(ErrorKind::DegenerateCylinder, "height_h below 1 collapses top and bottom");
  }
  if (spec.scaled_length() < 2.0) {
    throw Error(ErrorKind::DegenerateCylinder, "scaled basis length below 2");
  }
}

/// Coordinates of a point relative to the scaled cylinder: `along` runs from
/// 0 at the left face to L = n l(A) at the right face, `height` from -h at
/// the bottom to +h at the top.
struct LocalCoords {
  double along = 0.0;
  double height = 0.0;
};

class CylinderFrame {
 public:
  explicit CylinderFrame(const CylinderSpec& spec)
      : origin_(spec.scaled_a()),
        normal_(spec.normal()),
        perp_(spec.perp()),
        length_(spec.scaled_length()),
        half_height_(spec.height_h) {}

  LocalCoords local(Vec2 p) const {
    const Vec2 d = p - origin_;
    return {dot(d, perp_), dot(d, normal_)};
  }

  Vec2 global(LocalCoords c) const { return origin_ + c.along * perp_ + c.height * normal_; }

  bool contains(Vec2 p) const {
    const LocalCoords c = local(p);
    return c.along >= -tol::region && c.along <= length_ + tol::region &&
           c.height >= -half_height_ - tol::region && c.height <= half_height_ + tol::region;
  }

  double length() const { return length_; }
  double half_height() const { return half_height_; }
  Vec2 normal() const { return normal_; }
  Vec2 perp() const { return perp_; }

 private:
  Vec2 origin_;
  Vec2 normal_;
  Vec2 perp_;
  double length_;
  double half_height_;
};

struct AngleInterval {
  double lo = 0.0;
  double hi = 0.0;

  bool contains(double angle, double slack = 0.0) const {
    return angle >= lo - slack && angle <= hi + slack;
  }
};

/// Angles for which some admissible boundary condition exists.
inline AngleInterval admissible_window(const CylinderSpec& spec) {
  const double half = std::atan(2.0 * spec.height_h / spec.scaled_length());
  return {spec.theta - half, spec.theta + half};
}

/// Angles compatible with a chord starting at relative height k on the left side.
inline AngleInterval admissible_angles(const CylinderSpec& spec, double k) {
  const double len = spec.scaled_length();
  return {spec.theta - std::atan(2.0 * spec.height_h * k / len),
          spec.theta + std::atan(2.0 * spec.height_h * (1.0 - k) / len)};
}

inline bool is_admissible(const CylinderSpec& spec, double k, double theta_tilde) {
  if (!(k >= 0.0 && k <= 1.0) || !std::isfinite(theta_tilde)) return false;
  return admissible_angles(spec, k).contains(theta_tilde, tol::admissibility);
}

/// End points of the chord of a boundary condition: c sits at height
/// (2k - 1) h on the left face, d is where the line through c orthogonal to
/// the tilted normal meets the right face.
struct Chord {
  Vec2 c;
  Vec2 d;
  Vec2 normal;  // (cos theta_tilde, sin theta_tilde)
};

inline Chord chord_of(const CylinderSpec& spec, double k, double theta_tilde) {
  if (!is_admissible(spec, k, theta_tilde)) {
    throw Error(ErrorKind::NotAdmissible, "boundary condition (k=" + std::to_string(k) +
                                              ", theta=" + std::to_string(theta_tilde) +
                                              ") lies outside D(A,h)");
  }
  const CylinderFrame frame(spec);
  const double tilt = theta_tilde - spec.theta;
  const double c_height = (2.0 * k - 1.0) * spec.height_h;
  const double d_height = c_height + frame.length() * std::tan(tilt);
  if (std::abs(d_height) > spec.height_h + tol::admissibility) {
    throw Error(ErrorKind::ChordOutside, "chord end point leaves the right face");
  }
  return {frame.global({0.0, c_height}), frame.global({frame.length(), d_height}),
          normal_of(theta_tilde)};
}

}  // namespace tiltflow
