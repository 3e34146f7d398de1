#include "avp/prediction.hpp"

#include <algorithm>
#include <stdexcept>

namespace avp
{

Pose2 intention_goal(const IntentTag & tag, const IntentionDistribution & dist, const ParkingLot & lot)
{
  switch (tag.kind) {
    case IntentTag::Kind::Spot:
      return lot.spots.at(tag.index).pose();
    case IntentTag::Kind::Explore:
      return dist.exploration_points.at(tag.index);
    case IntentTag::Kind::None:
      break;
  }
  throw std::invalid_argument("intention_goal: untagged intention");
}

PredictedTrajectory cv_trajectory(const ObservedVehicle & v, const PredictionParams & params)
{
  PredictedTrajectory t;
  t.agent_id = v.id;
  t.agent = PredictedTrajectory::Agent::Vehicle;
  t.length = v.length;
  t.width = v.width;
  t.poses = cv_predict(v.pose(), current_signed_speed(v.history, params.dt), params.dt, params.horizon());
  return t;
}

namespace
{

std::vector<Pose2> planner_poses(
  const ObservedVehicle & v, const IntentTag & tag, const Pose2 & goal, const ParkingLot & lot,
  std::span<const int> believed_occupied, const PredictionParams & params)
{
  VehicleState start;
  start.pose = v.pose();
  start.length = v.length;
  start.width = v.width;
  std::optional<MotionPlan> plan;
  try {
    if (tag.kind == IntentTag::Kind::Spot) {
      plan = plan_park(start, tag.index, lot, believed_occupied, params.planner);
    } else {
      plan = plan_to_pose(start, goal, lot, believed_occupied, params.planner);
    }
  } catch (const std::invalid_argument &) {
    plan.reset();
  }
  if (!plan) {
    return {};
  }
  const int n = horizon_steps(params.horizon(), params.dt);
  std::vector<Pose2> out;
  out.reserve(n);
  for (int k = 1; k <= n; ++k) {
    const auto i = std::min<std::size_t>(k, plan->states.size() - 1);
    out.push_back(plan->states[i].pose);
  }
  return out;
}

}  // namespace

std::vector<PredictedTrajectory> predict_all(
  const Observation & obs, std::span<const VehicleIntent> intents, const ParkingLot & lot,
  std::span<const int> believed_occupied, const PredictionParams & params)
{
  if (params.mu < 0.0 || params.mu > 1.0) {
    throw std::invalid_argument("predict_all: mu must be in [0, 1]");
  }
  std::vector<PredictedTrajectory> out;
  for (const auto & v : obs.dynamic_vehicles) {
    const auto it = std::find_if(
      intents.begin(), intents.end(), [&](const VehicleIntent & vi) { return vi.vehicle == v.id; });
    std::size_t emitted = 0;
    if (it != intents.end()) {
      const auto & dist = it->dist;
      std::vector<std::pair<IntentTag, double>> chosen;
      for (const auto & [spot, eta] : dist.spot_probs) {
        if (eta >= params.mu) {
          chosen.push_back({{IntentTag::Kind::Spot, spot}, eta});
        }
      }
      for (std::size_t q = 0; q < dist.exploration_probs.size(); ++q) {
        if (dist.exploration_probs[q] >= params.mu) {
          chosen.push_back({{IntentTag::Kind::Explore, static_cast<int>(q)}, dist.exploration_probs[q]});
        }
      }
      for (const auto & [tag, eta] : chosen) {
        PredictedTrajectory t;
        t.agent_id = v.id;
        t.agent = PredictedTrajectory::Agent::Vehicle;
        t.intent = tag;
        t.probability = eta;
        t.length = v.length;
        t.width = v.width;
        const Pose2 goal = intention_goal(tag, dist, lot);
        switch (params.method) {
          case TrajectoryMethod::Bezier: {
            const auto curve = bezier_control_points(v.pose(), it->v_bar, goal, params.zeta, params.start_tangent);
            t.poses = bezier_predict(
              curve, goal.theta, v.pose().theta, it->v_bar, params.dt, params.t_pred, params.horizon());
            break;
          }
          case TrajectoryMethod::ConstantVelocity:
            t.poses = cv_trajectory(v, params).poses;
            break;
          case TrajectoryMethod::Planner:
            t.poses = planner_poses(v, tag, goal, lot, believed_occupied, params);
            if (t.poses.empty()) {
              t.poses = cv_trajectory(v, params).poses;
            }
            break;
        }
        out.push_back(std::move(t));
        ++emitted;
      }
    }
    if (emitted == 0) {
      out.push_back(cv_trajectory(v, params));
    }
  }
  for (const auto & p : obs.pedestrians) {
    PredictedTrajectory t;
    t.agent_id = p.id;
    t.agent = PredictedTrajectory::Agent::Pedestrian;
    t.radius = p.radius;
    for (const auto & q : pedestrian_predict(p.position, p.previous, params.dt, params.horizon())) {
      t.poses.push_back({q.x(), q.y(), 0.0});
    }
    out.push_back(std::move(t));
  }
  return out;
}

}  // namespace avp
