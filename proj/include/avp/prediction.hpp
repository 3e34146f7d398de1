#pragma once

#include "avp/intention.hpp"
#include "avp/planner.hpp"
#include "avp/sensing.hpp"
#include "avp/trajectory.hpp"

#include <span>
#include <vector>

namespace avp
{

enum class TrajectoryMethod { Bezier, ConstantVelocity, Planner };

struct PredictionParams
{
  TrajectoryMethod method{TrajectoryMethod::Bezier};
  double mu{0.3};
  double zeta{3.0};
  double dt{0.1};
  double t_pred{3.0};
  double t_plan{5.0};
  BezierStartTangent start_tangent{BezierStartTangent::AsPaper};
  /// Used by the planner method only; a small budget keeps it a predictor, not a search.
  PlannerConfig planner;

  double horizon() const { return std::max(t_pred, t_plan); }
};

/// Goal pose of one intention: a spot center with the spot heading, or the exploration pose.
Pose2 intention_goal(const IntentTag & tag, const IntentionDistribution & dist, const ParkingLot & lot);

/// One trajectory per qualifying intention (eta >= mu) of each observed dynamic vehicle, in
/// vehicle id order, spots before exploration points; a single constant-velocity trajectory for
/// vehicles with none; then one constant-velocity trajectory per pedestrian. Every trajectory
/// covers max(t_pred, t_plan).
std::vector<PredictedTrajectory> predict_all(
  const Observation & obs, std::span<const VehicleIntent> intents, const ParkingLot & lot,
  std::span<const int> believed_occupied, const PredictionParams & params);

/// Constant-velocity trajectory of one observed vehicle at its current signed speed.
PredictedTrajectory cv_trajectory(const ObservedVehicle & v, const PredictionParams & params);

}  // namespace avp
