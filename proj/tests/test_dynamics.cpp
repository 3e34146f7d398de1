#include "avp/dynamics.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace avp;

TEST(StepVehicle, Examples)
{
  VehicleState s;
  s = step_vehicle(s, {1.0, 0.0}, 0.1);
  EXPECT_NEAR(s.pose.x, 0.1, 1e-15);
  EXPECT_NEAR(s.pose.y, 0.0, 1e-15);
  EXPECT_NEAR(s.pose.theta, 0.0, 1e-15);

  VehicleState up;
  up.pose = {0.0, 0.0, std::numbers::pi / 2.0};
  up = step_vehicle(up, {2.0, 0.5}, 0.1);
  EXPECT_NEAR(up.pose.x, 0.0, 1e-15);
  EXPECT_NEAR(up.pose.y, 0.2, 1e-15);
  EXPECT_NEAR(up.pose.theta, std::numbers::pi / 2.0 + 0.05, 1e-15);

  VehicleState c;
  c.pose = {1.0, 2.0, 0.3};
  c = step_vehicle(c, {-1.5, -0.2}, 0.1);
  // Hand evaluation: x = 1 - 0.15 cos 0.3, y = 2 - 0.15 sin 0.3, theta = 0.28.
  EXPECT_NEAR(c.pose.x, 1.0 - 0.15 * 0.955336489125606, 1e-12);
  EXPECT_NEAR(c.pose.y, 2.0 - 0.15 * 0.295520206661340, 1e-12);
  EXPECT_NEAR(c.pose.theta, 0.28, 1e-15);

  EXPECT_THROW(step_vehicle(c, {1.0, 0.0}, 0.0), std::invalid_argument);
}

TEST(StepVehicle, Properties)
{
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    VehicleState s;
    s.pose = {10.0 * u(rng), 10.0 * u(rng), std::numbers::pi * u(rng)};
    const VehicleControl ctl{5.0 * u(rng), u(rng)};
    const VehicleState n = step_vehicle(s, ctl, 0.1);
    EXPECT_LE(std::abs(n.pose.theta), std::numbers::pi);
    EXPECT_NEAR((n.pose.position() - s.pose.position()).norm(), std::abs(ctl.v) * 0.1, 1e-12);
    const VehicleState idle = step_vehicle(s, {}, 0.1);
    EXPECT_EQ(idle.pose.x, s.pose.x);
    EXPECT_EQ(idle.pose.y, s.pose.y);
    EXPECT_NEAR(idle.pose.theta, s.pose.theta, 1e-15);
    const VehicleState back = step_vehicle(step_vehicle(s, {ctl.v, 0.0}, 0.1), {-ctl.v, 0.0}, 0.1);
    EXPECT_NEAR(back.pose.x, s.pose.x, 1e-12);
    EXPECT_NEAR(back.pose.y, s.pose.y, 1e-12);
  }
}

TEST(StepPedestrian, Examples)
{
  PedestrianState p;
  EXPECT_NEAR(step_pedestrian(p, {1.0, 0.0}, 0.1).position.x(), 0.1, 1e-15);
  EXPECT_NEAR(step_pedestrian(p, {1.0, std::numbers::pi}, 0.1).position.x(), -0.1, 1e-15);
  p.position = {3.0, -2.0};
  const PedestrianState q = step_pedestrian(p, {1.4, std::numbers::pi / 4.0}, 0.1);
  EXPECT_NEAR(q.position.x(), 3.0 + 0.14 * std::sqrt(0.5), 1e-12);
  EXPECT_NEAR(q.position.y(), -2.0 + 0.14 * std::sqrt(0.5), 1e-12);
}

TEST(RolloutVehicle, MatchesIteration)
{
  VehicleState s;
  s.pose = {1.0, 1.0, 0.2};
  EXPECT_EQ(rollout_vehicle(s, {}, 0.1).size(), 1u);
  const std::vector<VehicleControl> zeros(5);
  const auto still = rollout_vehicle(s, zeros, 0.1);
  ASSERT_EQ(still.size(), 6u);
  for (const auto & st : still) {
    EXPECT_EQ(st.pose.x, s.pose.x);
  }
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<VehicleControl> controls;
  for (int i = 0; i < 10; ++i) {
    controls.push_back({2.0 * u(rng), u(rng)});
  }
  const auto traj = rollout_vehicle(s, controls, 0.1);
  ASSERT_EQ(traj.size(), 11u);
  VehicleState cur = s;
  for (int i = 0; i < 10; ++i) {
    cur = step_vehicle(cur, controls[i], 0.1);
    EXPECT_EQ(traj[i + 1].pose.x, cur.pose.x);
    EXPECT_EQ(traj[i + 1].pose.y, cur.pose.y);
    EXPECT_EQ(traj[i + 1].pose.theta, cur.pose.theta);
  }
}
