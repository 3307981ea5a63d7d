#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "covertrack/error.hpp"
#include "covertrack/geometry.hpp"

using namespace covertrack;

namespace {

FieldSpec field2400() { return FieldSpec{2400, 1200, 800, 45, 10, 5}; }

CameraPose bottom_cam(double x, double alpha) { return CameraPose::at(x, alpha, field2400()); }

}  // namespace

TEST(Perimeter, OriginAndFullWrap) {
  const auto f = field2400();
  EXPECT_EQ(perimeter_to_xy(0.0, f), (Vec2{0, 0}));
  EXPECT_EQ(perimeter_to_xy(7200.0, f), (Vec2{0, 0}));
}

TEST(Perimeter, HalfwayIsOppositeCorner) {
  // Bottom edge 2400, then right edge 1200 brings us to the top-right corner.
  EXPECT_EQ(perimeter_to_xy(3600.0, field2400()), (Vec2{2400, 1200}));
}

TEST(Perimeter, EdgesInOrder) {
  const auto f = field2400();
  EXPECT_EQ(perimeter_to_xy(100, f), (Vec2{100, 0}));
  EXPECT_EQ(perimeter_to_xy(2500, f), (Vec2{2400, 100}));
  EXPECT_EQ(perimeter_to_xy(3700, f), (Vec2{2300, 1200}));
  EXPECT_EQ(perimeter_to_xy(6100, f), (Vec2{0, 1100}));
  EXPECT_EQ(perimeter_to_xy(-100, f), (Vec2{0, 100}));
}

TEST(Perimeter, PeriodicAndLipschitz) {
  const auto f = field2400();
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> s(-20000, 20000);
  for (int k = 0; k < 10000; ++k) {
    const double a = s(gen);
    const Vec2 p = perimeter_to_xy(a, f);
    const Vec2 q = perimeter_to_xy(a + f.perimeter(), f);
    EXPECT_NEAR(p.x, q.x, 1e-9);
    EXPECT_NEAR(p.y, q.y, 1e-9);
    // Boundary membership.
    const bool on_edge = p.x == 0 || p.x == f.width || p.y == 0 || p.y == f.height;
    EXPECT_TRUE(on_edge);
    EXPECT_TRUE(f.contains(p));
    // Moving by h along the boundary moves by at most h in the plane.
    const double h = 7.5;
    EXPECT_LE(distance(p, perimeter_to_xy(a + h, f)), h + 1e-9);
  }
}

TEST(Angles, Wrapping) {
  EXPECT_DOUBLE_EQ(wrap_degrees(-5), 355);
  EXPECT_DOUBLE_EQ(wrap_degrees(725), 5);
  EXPECT_DOUBLE_EQ(wrap_degrees(360), 0);
  EXPECT_DOUBLE_EQ(wrap_signed_degrees(180), 180);
  EXPECT_DOUBLE_EQ(wrap_signed_degrees(-180), 180);
  EXPECT_DOUBLE_EQ(wrap_signed_degrees(190), -170);
}

TEST(Bearing, ZeroAlongPlusYClockwise) {
  EXPECT_NEAR(bearing_degrees({0, 0}, {0, 10}), 0, 1e-12);
  EXPECT_NEAR(bearing_degrees({0, 0}, {10, 0}), 90, 1e-12);
  EXPECT_NEAR(std::abs(bearing_degrees({0, 0}, {0, -10})), 180, 1e-12);
}

TEST(RelativeObs, DeadAhead) {
  const auto cam = bottom_cam(1200, 0);
  const auto obs = relative_obs(cam, {1200, 400}, field2400());
  ASSERT_TRUE(obs);
  EXPECT_DOUBLE_EQ(obs->d, 400);
  EXPECT_NEAR(obs->sin_theta, 0, 1e-15);
  EXPECT_NEAR(obs->cos_theta, 1, 1e-15);
}

TEST(RelativeObs, OutOfRange) {
  EXPECT_FALSE(relative_obs(bottom_cam(1200, 0), {1200, 900}, field2400()));
}

TEST(RelativeObs, SectorEdgeIsInclusive) {
  const auto obs = relative_obs(bottom_cam(1200, 0), {1600, 400}, field2400());
  ASSERT_TRUE(obs);
  EXPECT_NEAR(obs->d, 400 * std::sqrt(2.0), 1e-9);
  EXPECT_NEAR(obs->d, 565.685, 1e-3);
  EXPECT_NEAR(obs->sin_theta, std::sqrt(0.5), 1e-12);
  EXPECT_NEAR(obs->cos_theta, std::sqrt(0.5), 1e-12);
}

TEST(RelativeObs, DistanceEdgeIsInclusive) {
  EXPECT_TRUE(relative_obs(bottom_cam(1200, 0), {1200, 800}, field2400()));
  EXPECT_FALSE(relative_obs(bottom_cam(1200, 0), {1200, 800.000001}, field2400()));
}

TEST(RelativeObs, BehindTheCamera) {
  EXPECT_FALSE(relative_obs(bottom_cam(1200, 180), {1200, 400}, field2400()));
  EXPECT_FALSE(relative_obs(bottom_cam(1200, 0), {1700, 400}, field2400()));
}

TEST(Reconstruct, AxisAligned) {
  CameraPose cam;
  cam.alpha = 0;
  cam.pos = {0, 0};
  const Vec2 p = reconstruct_position(cam, 100, 0);
  EXPECT_NEAR(p.x, 0, 1e-12);
  EXPECT_NEAR(p.y, 100, 1e-12);
}

TEST(Reconstruct, FortyFiveDegrees) {
  CameraPose cam;
  cam.alpha = 30;
  cam.pos = {100, 50};
  const Vec2 p = reconstruct_position(cam, 200, 15);
  // 100 + 200 sin 45, 50 + 200 cos 45
  EXPECT_NEAR(p.x, 241.4214, 1e-4);
  EXPECT_NEAR(p.y, 191.4214, 1e-4);
}

TEST(Reconstruct, RoundTripRandomPairs) {
  const auto f = field2400();
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> u(0, 1);
  int checked = 0;
  while (checked < 10000) {
    const auto cam = CameraPose::at(u(gen) * f.perimeter(), u(gen) * 360, f);
    const double d = u(gen) * f.vis_distance;
    const double theta = (2 * u(gen) - 1) * f.vis_half_angle;
    const Vec2 target = reconstruct_position(cam, d, theta);
    if (!f.contains(target)) continue;
    const auto obs = relative_obs(cam, target, f);
    ASSERT_TRUE(obs) << "target generated inside the sector must be observed";
    EXPECT_NEAR(obs->sin_theta * obs->sin_theta + obs->cos_theta * obs->cos_theta, 1.0, 1e-9);
    const Vec2 back = reconstruct_position(cam, *obs);
    EXPECT_LT(distance(back, target), 1e-9);
    ++checked;
  }
}

TEST(FieldOfView, MonotoneInDistanceAndAngle) {
  const auto f = field2400();
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> u(0, 1);
  for (int k = 0; k < 5000; ++k) {
    CameraPose cam;
    cam.alpha = u(gen) * 360;
    cam.pos = {1200, 600};
    const double d = u(gen) * 1000;
    const double theta = (2 * u(gen) - 1) * 90;
    const bool seen = in_view(cam, reconstruct_position(cam, d, theta), f);
    const bool closer = in_view(cam, reconstruct_position(cam, d * u(gen), theta), f);
    const bool narrower = in_view(cam, reconstruct_position(cam, d, theta * u(gen)), f);
    if (seen) {
      EXPECT_TRUE(closer);
      EXPECT_TRUE(narrower);
    }
  }
}

TEST(FieldSpec, Validation) {
  FieldSpec f;
  EXPECT_NO_THROW(f.validate());
  f.width = 0;
  EXPECT_THROW(f.validate(), ConfigError);
  f = FieldSpec{};
  f.vis_half_angle = 180;
  EXPECT_THROW(f.validate(), ConfigError);
  f = FieldSpec{};
  f.vis_distance = -1;
  EXPECT_THROW(f.validate(), ConfigError);
}
