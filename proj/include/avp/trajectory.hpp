#pragma once

#include "avp/bezier.hpp"
#include "avp/dynamics.hpp"
#include "avp/geometry.hpp"

#include <vector>

namespace avp
{

struct IntentTag
{
  enum class Kind { None, Spot, Explore };

  Kind kind{Kind::None};
  /// Spot index, or exploration-candidate index, or -1.
  int index{-1};
};

/// Poses at t + dt, t + 2 dt, ... for one agent under one intention.
struct PredictedTrajectory
{
  enum class Agent { Vehicle, Pedestrian };

  int agent_id{-1};
  Agent agent{Agent::Vehicle};
  IntentTag intent;
  double probability{1.0};
  /// Footprint for vehicles; pedestrians use `radius`.
  double length{0.0};
  double width{0.0};
  double radius{0.0};
  std::vector<Pose2> poses;

  int steps() const { return static_cast<int>(poses.size()); }
};

enum class BezierStartTangent { AsPaper, Forward };

/// p1 points along theta + pi (AsPaper) or along theta (Forward); p2 sits behind the goal
/// along its heading, so the curve enters the goal moving along theta_goal.
CubicBezier<double> bezier_control_points(
  const Pose2 & state, double v_bar, const Pose2 & goal, double zeta,
  BezierStartTangent start_tangent = BezierStartTangent::AsPaper);

/// Number of whole dt steps in `horizon`.
int horizon_steps(double horizon, double dt);

/// Traverses the curve by arc length at v_bar for t_pred, holds the goal once the curve is
/// exhausted, then continues with a constant-velocity fill up to t_total.
std::vector<Pose2> bezier_predict(
  const CubicBezier<double> & curve, double goal_heading, double start_heading, double v_bar, double dt,
  double t_pred, double t_total);

std::vector<Pose2> cv_predict(const Pose2 & pose, double v_bar, double dt, double horizon);

std::vector<Vec2> pedestrian_predict(const Vec2 & p_now, const Vec2 & p_prev, double dt, double horizon);

/// Mean speed over consecutive history poses; 0 for fewer than two poses.
double mean_speed(const std::vector<Pose2> & history, double dt);

/// Velocity over the last history step projected on the current heading (negative when reversing).
double current_signed_speed(const std::vector<Pose2> & history, double dt);

}  // namespace avp
