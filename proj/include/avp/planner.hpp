#pragma once

#include "avp/dynamics.hpp"
#include "avp/geometry.hpp"
#include "avp/trajectory.hpp"

#include <limits>
#include <optional>
#include <span>
#include <vector>

namespace avp
{

struct PlannerConfig
{
  double dt{0.1};
  double xy_resolution{0.25};
  int heading_bins{72};
  double min_turning_radius{2.5};
  double forward_speed{2.0};
  double reverse_speed{1.0};
  /// Whole dt steps per primitive in each direction.
  int forward_steps{3};
  int reverse_steps{5};
  int steering_samples{7};
  double reverse_penalty{2.0};
  double switch_penalty{5.0};
  double time_penalty{0.1};
  double heading_change_penalty{0.0};
  int node_budget{200000};
  int analytic_interval{32};
  /// Analytic expansion is also tried on every node this close to the goal.
  double analytic_radius{8.0};
  double inflation{0.1};
  double max_plan_duration{30.0};
  double heuristic_resolution{0.5};
  /// Weighted A*: f = g + weight * h.
  double heuristic_weight{1.5};
  /// Near the goal, analytic expansion is tried on every n-th expansion only.
  int analytic_near_interval{1};
  double goal_xy_tolerance{0.5};
  double goal_heading_tolerance{0.2};

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
};

struct MotionPlan
{
  std::vector<VehicleControl> controls;
  /// states[0] is the start; states[k + 1] = step_vehicle(states[k], controls[k]).
  std::vector<VehicleState> states;
  double cost{0.0};
  /// Goal spot for parking plans, -1 otherwise.
  int spot{-1};
  Pose2 goal_pose;

  int steps() const { return static_cast<int>(controls.size()); }
  bool is_park() const { return spot >= 0; }
};

/// Static obstacles seen by the planner.
struct PlanningScene
{
  const ParkingLot * lot{nullptr};
  std::vector<OrientedRect> obstacles;
  /// Cached AABB half extents of `obstacles`; recomputed on demand when out of step.
  std::vector<Vec2> obstacle_extents;

  /// Believed-occupied spot rectangles (skipping `except_spot`) plus any extra rectangles.
  static PlanningScene build(
    const ParkingLot & lot, std::span<const int> believed_occupied, std::span<const OrientedRect> extra,
    int except_spot = -1);

  /// Exact footprint inside the lot and inflated footprint clear of every obstacle.
  bool footprint_free(const OrientedRect & footprint, double inflation) const;
};

struct SearchStats
{
  int expansions{0};
  bool budget_exhausted{false};
};

/// Hybrid A* to a pose where the footprint is contained in `spot`. Returns nullopt when the goal
/// spot is believed occupied, no plan exists within the budget, or every plan costs more than
/// `cost_bound`.
std::optional<MotionPlan> plan_park(
  const VehicleState & start, int spot, const ParkingLot & lot, std::span<const int> believed_occupied,
  const PlannerConfig & config, std::span<const OrientedRect> extra_obstacles = {},
  double cost_bound = std::numeric_limits<double>::infinity(), SearchStats * stats = nullptr);

/// Hybrid A* to within (goal_xy_tolerance, goal_heading_tolerance) of `goal`.
std::optional<MotionPlan> plan_to_pose(
  const VehicleState & start, const Pose2 & goal, const ParkingLot & lot, std::span<const int> believed_occupied,
  const PlannerConfig & config, std::span<const OrientedRect> extra_obstacles = {},
  double cost_bound = std::numeric_limits<double>::infinity(), SearchStats * stats = nullptr);

/// Forward distance + reverse_penalty * reverse distance + switch_penalty * direction switches
/// + time_penalty * duration + heading_change_penalty * total turning.
double plan_cost(std::span<const VehicleControl> controls, const PlannerConfig & config);
inline double plan_cost(const MotionPlan & plan, const PlannerConfig & config)
{
  return plan_cost(plan.controls, config);
}

struct ValidationResult
{
  bool ok{true};
  /// 1-based step of the first conflict, counted from the plan cursor; 0 when ok.
  int blocked_step{0};

  static ValidationResult pass() { return {}; }
  static ValidationResult blocked(int step) { return {false, step}; }
};

/// Checks the remainder of `plan` after `cursor` controls have been executed. Step j of the
/// remainder is compared with pose j of each prediction; steps past a prediction's horizon are
/// only checked against the static scene.
ValidationResult validate_plan(
  const MotionPlan & plan, int cursor, std::span<const PredictedTrajectory> predictions,
  const PlanningScene & scene, double inflation);

}  // namespace avp
