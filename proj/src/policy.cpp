#include "avp/policy.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>

namespace avp
{

std::vector<int> candidate_ego_spots(const Observation & obs, const BeliefMap & beliefs, double delta)
{
  std::vector<int> out;
  for (int i : obs.vacant_spots) {
    if (beliefs[i] <= delta) {
      out.push_back(i);
    }
  }
  return out;
}

std::vector<ExplorationPoint> ego_exploration_points(
  const ParkingLot & lot, const VehicleState & ego, const SensingRegion & region)
{
  const PlacedRegion placed = place_region(region, ego.pose);
  const Vec2 h = ego.pose.heading();
  std::vector<ExplorationPoint> front;
  std::vector<ExplorationPoint> back;
  for (const auto & road : lot.roads) {
    const double heading = road.heading();
    for (const auto & p : segment_region_boundary_points(road.start, road.end, placed)) {
      const bool is_front = h.dot(p - ego.pose.position()) >= 0.0;
      for (double th : {heading, normalize_angle(heading + std::numbers::pi)}) {
        (is_front ? front : back).push_back({Pose2{p.x(), p.y(), th}, is_front});
      }
    }
  }
  front.insert(front.end(), back.begin(), back.end());
  return front;
}

const char * to_string(EgoDecision::Kind kind)
{
  switch (kind) {
    case EgoDecision::Kind::Continue:
      return "continue";
    case EgoDecision::Kind::Park:
      return "park";
    case EgoDecision::Kind::Explore:
      return "explore";
    case EgoDecision::Kind::Idle:
      return "idle";
  }
  return "?";
}

EgoPolicy::EgoPolicy(PolicyParams params) : params_(std::move(params)) { params_.planner.validate(); }

bool EgoPolicy::finished_parking() const
{
  return active_ && active_->is_park() && cursor_ >= active_->steps();
}

std::vector<int> EgoPolicy::believed_occupied(const BeliefMap & beliefs) const
{
  std::vector<int> out;
  for (int i = 0; i < beliefs.size(); ++i) {
    if (beliefs[i] >= params_.beta) {
      out.push_back(i);
    }
  }
  return out;
}

std::vector<OrientedRect> EgoPolicy::stationary_obstacles(const Observation & obs) const
{
  std::vector<OrientedRect> out;
  for (const auto & v : obs.static_vehicles) {
    out.push_back(v.footprint());
  }
  for (const auto & v : obs.dynamic_vehicles) {
    if (std::abs(current_signed_speed(v.history, params_.planner.dt)) < params_.stationary_speed) {
      out.push_back(v.footprint());
    }
  }
  return out;
}

bool EgoPolicy::still_valid(const DecisionInput & in) const
{
  if (!active_ || cursor_ >= active_->steps()) {
    return false;
  }
  if (active_->is_park() && (*in.beliefs)[active_->spot] > params_.delta) {
    return false;
  }
  const auto occupied = believed_occupied(*in.beliefs);
  const PlanningScene scene = PlanningScene::build(*in.lot, occupied, {}, active_->spot);
  return validate_plan(*active_, cursor_, in.predictions, scene, params_.planner.inflation).ok;
}

namespace
{

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

}  // namespace

std::optional<MotionPlan> EgoPolicy::try_park(
  const DecisionInput & in, const std::vector<int> & candidates, EgoDecision & d)
{
  const auto occupied = believed_occupied(*in.beliefs);
  const auto extra = stationary_obstacles(*in.obs);
  std::vector<int> order = candidates;
  if (in.priority) {
    order.clear();
    for (int i : *in.priority) {
      if (std::find(candidates.begin(), candidates.end(), i) != candidates.end()) {
        order.push_back(i);
      }
    }
  } else {
    const Vec2 p = in.ego.pose.position();
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return (in.lot->spots[a].center - p).norm() < (in.lot->spots[b].center - p).norm();
    });
  }
  if (static_cast<int>(order.size()) > params_.max_candidates) {
    order.resize(params_.max_candidates);
  }

  std::optional<MotionPlan> best;
  for (int spot : order) {
    const double bound = best ? best->cost : std::numeric_limits<double>::infinity();
    const auto t0 = Clock::now();
    auto plan = plan_park(in.ego, spot, *in.lot, occupied, params_.planner, extra, bound);
    d.planning_seconds += seconds_since(t0);
    ++d.planner_calls;
    if (!plan) {
      continue;
    }
    const PlanningScene scene = PlanningScene::build(*in.lot, occupied, {}, spot);
    if (!validate_plan(*plan, 0, in.predictions, scene, params_.planner.inflation).ok) {
      continue;
    }
    if (!best || plan->cost < best->cost || (plan->cost == best->cost && spot < best->spot)) {
      best = std::move(plan);
    }
    if (in.priority) {
      break;
    }
  }
  return best;
}

std::optional<MotionPlan> EgoPolicy::try_explore(const DecisionInput & in, EgoDecision & d)
{
  const auto occupied = believed_occupied(*in.beliefs);
  const auto extra = stationary_obstacles(*in.obs);
  const PlanningScene scene = PlanningScene::build(*in.lot, occupied, {});
  const auto points = ego_exploration_points(*in.lot, in.ego, in.region);
  for (bool front : {true, false}) {
    std::optional<MotionPlan> best;
    for (const auto & q : points) {
      if (q.front != front) {
        continue;
      }
      const double bound = best ? best->cost : std::numeric_limits<double>::infinity();
      const auto t0 = Clock::now();
      auto plan = plan_to_pose(in.ego, q.pose, *in.lot, occupied, params_.planner, extra, bound);
      d.planning_seconds += seconds_since(t0);
      ++d.planner_calls;
      // An empty plan means the ego already stands on the point; it reveals nothing new.
      if (!plan || plan->steps() == 0) {
        continue;
      }
      if (!validate_plan(*plan, 0, in.predictions, scene, params_.planner.inflation).ok) {
        continue;
      }
      if (!best || plan->cost < best->cost) {
        best = std::move(plan);
      }
    }
    if (best) {
      return best;
    }
  }
  return std::nullopt;
}

EgoDecision EgoPolicy::emit(EgoDecision d)
{
  if (d.kind == EgoDecision::Kind::Idle || !active_ || cursor_ >= active_->steps()) {
    d.control = {};
    return d;
  }
  d.control = active_->controls[cursor_++];
  d.spot = active_->spot;
  d.goal = active_->goal_pose;
  return d;
}

EgoDecision EgoPolicy::decide(const DecisionInput & in)
{
  EgoDecision d;
  const auto candidates = candidate_ego_spots(*in.obs, *in.beliefs, params_.delta);

  if (still_valid(in)) {
    bool retry = false;
    if (active_kind_ == EgoDecision::Kind::Explore || params_.replan_on_better) {
      const bool fresh = std::any_of(candidates.begin(), candidates.end(), [&](int i) {
        return std::find(attempted_.begin(), attempted_.end(), i) == attempted_.end();
      });
      retry = !candidates.empty() && (fresh || in.time - last_park_attempt_ >= params_.park_retry_interval - 1e-9);
    }
    if (retry) {
      last_park_attempt_ = in.time;
      attempted_ = candidates;
      if (auto plan = try_park(in, candidates, d)) {
        const bool better = active_kind_ == EgoDecision::Kind::Explore || plan->cost < active_->cost - 1e-9;
        if (better) {
          active_ = std::move(plan);
          active_kind_ = EgoDecision::Kind::Park;
          cursor_ = 0;
          d.kind = EgoDecision::Kind::Park;
          return emit(d);
        }
      }
    }
    d.kind = EgoDecision::Kind::Continue;
    return emit(d);
  }

  active_.reset();
  cursor_ = 0;
  last_park_attempt_ = in.time;
  attempted_ = candidates;
  if (auto plan = try_park(in, candidates, d)) {
    active_ = std::move(plan);
    active_kind_ = EgoDecision::Kind::Park;
    d.kind = EgoDecision::Kind::Park;
    return emit(d);
  }
  if (auto plan = try_explore(in, d)) {
    active_ = std::move(plan);
    active_kind_ = EgoDecision::Kind::Explore;
    d.kind = EgoDecision::Kind::Explore;
    return emit(d);
  }
  active_kind_ = EgoDecision::Kind::Idle;
  d.kind = EgoDecision::Kind::Idle;
  return emit(d);
}

}  // namespace avp
