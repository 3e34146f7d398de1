#pragma once

#include "avp/belief.hpp"
#include "avp/planner.hpp"
#include "avp/sensing.hpp"
#include "avp/trajectory.hpp"

#include <optional>
#include <span>
#include <vector>

namespace avp
{

/// Observed vacant spots whose belief is at most delta.
std::vector<int> candidate_ego_spots(const Observation & obs, const BeliefMap & beliefs, double delta);

struct ExplorationPoint
{
  Pose2 pose;
  bool front{true};
};

/// Crossings of every road center line with the boundary of the placed sensing region, each in
/// both travel directions. Points with a non-negative dot product between the ego heading and
/// the offset to the point come first; order is otherwise by road, then along the road.
std::vector<ExplorationPoint> ego_exploration_points(
  const ParkingLot & lot, const VehicleState & ego, const SensingRegion & region);

struct PolicyParams
{
  double delta{0.3};
  double beta{0.5};
  int max_candidates{5};
  /// While exploring, parking is retried when a new candidate appears or after this long.
  double park_retry_interval{1.0};
  bool replan_on_better{false};
  /// Dynamic vehicles slower than this are planned around as static obstacles.
  double stationary_speed{0.05};
  PlannerConfig planner;
};

struct EgoDecision
{
  enum class Kind { Continue, Park, Explore, Idle };

  Kind kind{Kind::Idle};
  VehicleControl control;
  /// Goal of the plan being executed, when any.
  int spot{-1};
  Pose2 goal;
  int planner_calls{0};
  /// Wall time spent in the planner during this decision.
  double planning_seconds{0.0};
};

const char * to_string(EgoDecision::Kind kind);

struct DecisionInput
{
  double time{0.0};
  VehicleState ego;
  const Observation * obs{nullptr};
  const BeliefMap * beliefs{nullptr};
  std::span<const PredictedTrajectory> predictions;
  const ParkingLot * lot{nullptr};
  SensingRegion region;
  /// When set, candidate spots are tried in this order and the first valid plan wins (ego-side
  /// intention ranking); otherwise candidates are tried nearest first and the cheapest plan wins.
  std::optional<std::vector<int>> priority;
};

class EgoPolicy
{
public:
  explicit EgoPolicy(PolicyParams params);

  EgoDecision decide(const DecisionInput & in);

  const std::optional<MotionPlan> & active_plan() const { return active_; }
  int cursor() const { return cursor_; }
  /// True once the active parking plan has been fully executed.
  bool finished_parking() const;

private:
  std::vector<int> believed_occupied(const BeliefMap & beliefs) const;
  std::vector<OrientedRect> stationary_obstacles(const Observation & obs) const;
  bool still_valid(const DecisionInput & in) const;
  std::optional<MotionPlan> try_park(const DecisionInput & in, const std::vector<int> & candidates, EgoDecision & d);
  std::optional<MotionPlan> try_explore(const DecisionInput & in, EgoDecision & d);
  EgoDecision emit(EgoDecision d);

  PolicyParams params_;
  std::optional<MotionPlan> active_;
  EgoDecision::Kind active_kind_{EgoDecision::Kind::Idle};
  int cursor_{0};
  double last_park_attempt_{-1e9};
  std::vector<int> attempted_;
};

}  // namespace avp
