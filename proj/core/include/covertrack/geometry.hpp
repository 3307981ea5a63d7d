#pragma once

#include <optional>

namespace covertrack {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Vec2&, const Vec2&) = default;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double k, Vec2 a) { return {k * a.x, k * a.y}; }
double norm(Vec2 v);
double distance(Vec2 a, Vec2 b);

/// Rectangular arena [0, width] x [0, height] plus the camera sensing and
/// kinematic constants. Angles are in degrees.
struct FieldSpec {
  double width = 2400.0;
  double height = 1200.0;
  double vis_distance = 800.0;
  double vis_half_angle = 45.0;
  double move_step = 10.0;
  double rotate_step = 5.0;

  double perimeter() const { return 2.0 * (width + height); }
  bool contains(Vec2 p) const;
  Vec2 clamp(Vec2 p) const;

  /// Throws ConfigError on non-positive sizes or a half angle outside (0, 180).
  void validate() const;
};

/// Wraps to [0, 360).
double wrap_degrees(double deg);
/// Wraps to (-180, 180].
double wrap_signed_degrees(double deg);
/// Wraps a perimeter coordinate to [0, P).
double wrap_perimeter(double s, const FieldSpec& field);

/// Maps a perimeter coordinate onto the boundary. Traversal starts at (0, 0)
/// and runs counterclockwise: bottom edge left to right, right edge upward,
/// top edge right to left, left edge downward.
Vec2 perimeter_to_xy(double s, const FieldSpec& field);

/// Bearing in degrees of `to` seen from `from`: 0 along +y, clockwise positive.
double bearing_degrees(Vec2 from, Vec2 to);

struct CameraPose {
  double s = 0.0;      // perimeter coordinate in [0, P)
  double alpha = 0.0;  // heading in [0, 360)
  Vec2 pos;            // always perimeter_to_xy(s)

  static CameraPose at(double s, double alpha, const FieldSpec& field);

  friend bool operator==(const CameraPose&, const CameraPose&) = default;
};

/// Distance and bearing offset of a target relative to a camera heading.
/// An unobserved target is encoded as all three fields equal to -1.
struct RelativeObs {
  double d = -1.0;
  double sin_theta = -1.0;
  double cos_theta = -1.0;

  static constexpr RelativeObs unobserved() { return {}; }
  bool observed() const { return !(d == -1.0 && sin_theta == -1.0 && cos_theta == -1.0); }

  friend bool operator==(const RelativeObs&, const RelativeObs&) = default;
};

/// Field-of-view test. Both the distance and the angle bounds are inclusive.
/// A target exactly at the camera position is observed with theta = 0.
std::optional<RelativeObs> relative_obs(const CameraPose& cam, Vec2 target,
                                        const FieldSpec& field);

inline bool in_view(const CameraPose& cam, Vec2 target, const FieldSpec& field) {
  return relative_obs(cam, target, field).has_value();
}

/// Inverse of relative_obs: x = xc + d sin(alpha + theta), y = yc + d cos(alpha + theta).
Vec2 reconstruct_position(const CameraPose& cam, double d, double theta_deg);
/// Same mapping driven by the (sin theta, cos theta) pair of an observation.
Vec2 reconstruct_position(const CameraPose& cam, const RelativeObs& obs);

}  // namespace covertrack
