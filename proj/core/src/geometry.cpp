#include "covertrack/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "covertrack/error.hpp"

namespace covertrack {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;
constexpr double kRadToDeg = 180.0 / std::numbers::pi;
// Slack on the angular FOV bound so targets placed exactly on the sector edge
// stay inside despite atan2 rounding.
constexpr double kAngleSlack = 1e-9;

}  // namespace

double norm(Vec2 v) { return std::hypot(v.x, v.y); }
double distance(Vec2 a, Vec2 b) { return norm(b - a); }

bool FieldSpec::contains(Vec2 p) const {
  return p.x >= 0.0 && p.x <= width && p.y >= 0.0 && p.y <= height;
}

Vec2 FieldSpec::clamp(Vec2 p) const {
  return {std::clamp(p.x, 0.0, width), std::clamp(p.y, 0.0, height)};
}

void FieldSpec::validate() const {
  if (!(width > 0.0) || !(height > 0.0)) throw ConfigError("field width and height must be positive");
  if (!(vis_distance > 0.0)) throw ConfigError("vis_distance must be positive");
  if (!(vis_half_angle > 0.0 && vis_half_angle < 180.0))
    throw ConfigError("vis_half_angle must lie in (0, 180)");
  if (!(move_step >= 0.0) || !(rotate_step >= 0.0)) throw ConfigError("step sizes must be non-negative");
}

double wrap_degrees(double deg) {
  double r = std::fmod(deg, 360.0);
  if (r < 0.0) r += 360.0;
  if (r >= 360.0) r = 0.0;
  return r;
}

double wrap_signed_degrees(double deg) {
  double r = wrap_degrees(deg);
  if (r > 180.0) r -= 360.0;
  return r;
}

double wrap_perimeter(double s, const FieldSpec& field) {
  const double p = field.perimeter();
  double r = std::fmod(s, p);
  if (r < 0.0) r += p;
  if (r >= p) r = 0.0;
  return r;
}

Vec2 perimeter_to_xy(double s, const FieldSpec& field) {
  const double w = field.width;
  const double h = field.height;
  s = wrap_perimeter(s, field);
  if (s < w) return {s, 0.0};
  if (s < w + h) return {w, s - w};
  if (s < 2.0 * w + h) return {w - (s - w - h), h};
  return {0.0, h - (s - 2.0 * w - h)};
}

double bearing_degrees(Vec2 from, Vec2 to) {
  const Vec2 d = to - from;
  return std::atan2(d.x, d.y) * kRadToDeg;
}

CameraPose CameraPose::at(double s, double alpha, const FieldSpec& field) {
  CameraPose pose;
  pose.s = wrap_perimeter(s, field);
  pose.alpha = wrap_degrees(alpha);
  pose.pos = perimeter_to_xy(pose.s, field);
  return pose;
}

std::optional<RelativeObs> relative_obs(const CameraPose& cam, Vec2 target,
                                        const FieldSpec& field) {
  const Vec2 delta = target - cam.pos;
  const double d = norm(delta);
  if (d > field.vis_distance) return std::nullopt;
  if (d == 0.0) return RelativeObs{0.0, 0.0, 1.0};

  const double theta = wrap_signed_degrees(bearing_degrees(cam.pos, target) - cam.alpha);
  if (std::abs(theta) > field.vis_half_angle + kAngleSlack) return std::nullopt;
  const double rad = theta * kDegToRad;
  return RelativeObs{d, std::sin(rad), std::cos(rad)};
}

Vec2 reconstruct_position(const CameraPose& cam, double d, double theta_deg) {
  const double heading = (cam.alpha + theta_deg) * kDegToRad;
  return {cam.pos.x + d * std::sin(heading), cam.pos.y + d * std::cos(heading)};
}

Vec2 reconstruct_position(const CameraPose& cam, const RelativeObs& obs) {
  const double a = cam.alpha * kDegToRad;
  const double sa = std::sin(a);
  const double ca = std::cos(a);
  // sin(a + t) and cos(a + t) by the angle-sum identities.
  const double s = sa * obs.cos_theta + ca * obs.sin_theta;
  const double c = ca * obs.cos_theta - sa * obs.sin_theta;
  return {cam.pos.x + obs.d * s, cam.pos.y + obs.d * c};
}

}  // namespace covertrack
