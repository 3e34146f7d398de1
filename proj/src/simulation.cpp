#include "avp/simulation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>
#include <stdexcept>

namespace avp
{

const char * to_string(Method m)
{
  switch (m) {
    case Method::ExplicitPastBezier:
      return "explicit-past-bezier";
    case Method::ExplicitPastCv:
      return "explicit-past-cv";
    case Method::ExplicitPastPlanner:
      return "explicit-past-planner";
    case Method::ImplicitEgoOnly:
      return "implicit-ego-only";
    case Method::ExplicitFuture:
      return "explicit-future";
  }
  return "?";
}

std::vector<Method> all_methods()
{
  return {
    Method::ExplicitPastBezier, Method::ExplicitPastCv, Method::ExplicitPastPlanner, Method::ImplicitEgoOnly,
    Method::ExplicitFuture};
}

Method parse_method(const std::string & name)
{
  for (Method m : all_methods()) {
    if (name == to_string(m)) {
      return m;
    }
  }
  throw std::invalid_argument("unknown method '" + name + "'");
}

TrajectoryMethod trajectory_method(Method m)
{
  switch (m) {
    case Method::ExplicitPastBezier:
      return TrajectoryMethod::Bezier;
    case Method::ExplicitPastPlanner:
      return TrajectoryMethod::Planner;
    default:
      return TrajectoryMethod::ConstantVelocity;
  }
}

const char * to_string(Outcome o)
{
  switch (o) {
    case Outcome::Parked:
      return "parked";
    case Outcome::Collision:
      return "collision";
    case Outcome::Timeout:
      return "timeout";
    case Outcome::Error:
      return "error";
  }
  return "?";
}

double future_occupancy(
  const OrientedRect & spot, std::span<const PredictedTrajectory> predictions, double t_pred, double dt)
{
  double free = 1.0;
  for (const auto & pred : predictions) {
    if (pred.agent != PredictedTrajectory::Agent::Vehicle) {
      continue;
    }
    for (int j = 0; j < pred.steps(); ++j) {
      const double t_arrival = (j + 1) * dt;
      if (t_arrival > t_pred + 1e-9) {
        break;
      }
      if (spot.contains(pred.poses[j].position())) {
        free *= t_arrival / (t_pred + dt);
        break;
      }
    }
  }
  return 1.0 - free;
}

namespace
{

using Clock = std::chrono::steady_clock;

std::vector<int> ego_priority(
  const VehicleState & ego, const std::vector<Pose2> & history, const std::vector<int> & candidates,
  const ParkingLot & lot, double clock, const IntentionParams & ip, HeuristicScorer & scorer)
{
  if (candidates.empty()) {
    return {};
  }
  ObservedVehicle me{0, ego.length, ego.width, history};
  ScoringRequest req;
  req.vehicle = 0;
  req.pose = ego.pose;
  req.spots = candidates;
  const IntentionFeatures base = compute_features(me, ego.pose.position(), lot, ip.dt, 0.0, clock);
  req.v_bar = base.v_bar;
  req.d_ent = base.d_ent;
  req.t_lot = base.t_lot;
  for (int i : candidates) {
    req.spot_features.push_back(compute_features(me, lot.spots[i].center, lot, ip.dt, 0.0, clock));
  }
  req.exploration_points = exploration_candidates_for(ego.pose, lot, ip.window);
  const auto dist = scorer.score(req);
  auto ranked = dist.spot_probs;
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto & a, const auto & b) { return a.second > b.second; });
  std::vector<int> out;
  for (const auto & [i, eta] : ranked) {
    out.push_back(i);
  }
  return out;
}

}  // namespace

EpisodeLog run_episode(const Scenario & sc, const SimConfig & cfg, IntentionScorer * scorer_in)
{
  const ParkingLot & lot = sc.layout.lot;
  const double dt = cfg.scenario.dt;
  const auto n_hist = static_cast<std::size_t>(std::lround(cfg.scenario.t_hist / dt));

  HeuristicScorer heuristic(cfg.scorer_weights);
  IntentionScorer & scorer = scorer_in ? *scorer_in : heuristic;
  IntentionParams ip = cfg.intention;
  ip.dt = dt;
  ip.t_hist = cfg.scenario.t_hist;
  PredictionParams pp = cfg.prediction;
  pp.method = trajectory_method(cfg.method);
  pp.dt = dt;
  PolicyParams policy_params = cfg.policy;
  policy_params.planner.dt = dt;
  EgoPolicy policy(policy_params);

  std::vector<ScriptedAgent> agents = sc.agents;
  std::vector<std::deque<Pose2>> histories;
  for (const auto & a : agents) {
    histories.emplace_back(a.history.begin(), a.history.end());
  }
  VehicleState ego = sc.ego;
  std::deque<Pose2> ego_history{ego.pose};
  BeliefMap b_obs = init_beliefs(lot.n_spot());
  std::map<int, double> first_seen;

  EpisodeLog log;
  log.seed = sc.seed;
  log.method = cfg.method;
  log.reactive = cfg.scenario.reactive;
  for (const auto & a : agents) {
    log.agent_ids.push_back(a.id);
    log.agent_is_vehicle.push_back(a.kind == ScriptedAgent::Kind::Vehicle);
    log.agent_targets.push_back(a.target_spot);
    log.agent_parked_at.push_back(-1.0);
  }

  auto agent_pose = [&](const ScriptedAgent & a) {
    return a.kind == ScriptedAgent::Kind::Vehicle ? a.vehicle.pose
                                                  : Pose2{a.pedestrian.position.x(), a.pedestrian.position.y(), 0.0};
  };

  const int max_steps = static_cast<int>(std::ceil(cfg.scenario.t_f / dt - 1e-9));
  log.outcome = Outcome::Timeout;
  log.t_end = max_steps * dt;
  for (int k = 0; k < max_steps; ++k) {
    const double t = k * dt;
    StepRecord rec;
    rec.time = t;
    rec.ego = ego.pose;
    for (const auto & a : agents) {
      rec.agents.push_back(agent_pose(a));
    }

    if (!cfg.idle_ego) {
      const auto t0 = Clock::now();
      WorldSnapshot world;
      world.time = t;
      world.vehicles.push_back(ego);
      world.histories.emplace_back(ego_history.begin(), ego_history.end());
      for (std::size_t i = 0; i < agents.size(); ++i) {
        if (agents[i].kind == ScriptedAgent::Kind::Vehicle) {
          world.vehicles.push_back(agents[i].vehicle);
          world.histories.emplace_back(histories[i].begin(), histories[i].end());
        } else {
          world.pedestrians.push_back(agents[i].pedestrian);
          world.pedestrian_previous.push_back(agents[i].pedestrian_previous);
        }
      }
      for (const auto & s : sc.static_vehicles) {
        world.vehicles.push_back(s);
        world.histories.emplace_back(n_hist + 1, s.pose);
      }

      const Observation obs = sense(world, lot, cfg.region, cfg.n_ray);
      for (const auto & v : obs.dynamic_vehicles) {
        first_seen.emplace(v.id, t);
      }
      for (const auto & v : obs.static_vehicles) {
        first_seen.emplace(v.id, t);
      }
      b_obs = observation_update(b_obs, obs.vacant_spots, obs.occupied_spots);
      b_obs.time = t;
      std::vector<int> occupied_now;
      for (int i = 0; i < b_obs.size(); ++i) {
        if (b_obs[i] >= ip.beta) {
          occupied_now.push_back(i);
        }
      }

      BeliefMap beliefs = b_obs;
      std::vector<VehicleIntent> intents;
      std::vector<PredictedTrajectory> predictions;
      DecisionInput in;
      const std::vector<Pose2> ego_hist(ego_history.begin(), ego_history.end());
      switch (cfg.method) {
        case Method::ExplicitPastBezier:
        case Method::ExplicitPastCv:
        case Method::ExplicitPastPlanner: {
          BevContext ctx{&lot, &b_obs, &obs, ego_hist, ego.length, ego.width};
          intents = estimate_intentions(ctx, first_seen, t, scorer, ip);
          std::vector<SpotIntents> maps;
          for (const auto & vi : intents) {
            maps.push_back(vi.dist.spot_map());
          }
          beliefs = intention_update(b_obs, obs.vacant_spots, maps);
          predictions = predict_all(obs, intents, lot, occupied_now, pp);
          break;
        }
        case Method::ImplicitEgoOnly: {
          predictions = predict_all(obs, {}, lot, occupied_now, pp);
          const auto cands = candidate_ego_spots(obs, beliefs, policy_params.delta);
          in.priority = ego_priority(ego, ego_hist, cands, lot, t, ip, heuristic);
          break;
        }
        case Method::ExplicitFuture:
          predictions = predict_all(obs, {}, lot, occupied_now, pp);
          for (int i : obs.vacant_spots) {
            beliefs.beliefs[i] = 1.0 - (1.0 - beliefs[i]) * (1.0 - future_occupancy(lot.spots[i], predictions, pp.t_pred, dt));
          }
          break;
      }
      log.selection_seconds.push_back(std::chrono::duration<double>(Clock::now() - t0).count());

      in.time = t;
      in.ego = ego;
      in.obs = &obs;
      in.beliefs = &beliefs;
      in.predictions = predictions;
      in.lot = &lot;
      in.region = cfg.region;
      rec.decision = policy.decide(in);
      if (rec.decision.planner_calls > 0) {
        log.planning_seconds.push_back(rec.decision.planning_seconds);
        log.planning_calls += rec.decision.planner_calls;
      }
      if (rec.decision.kind == EgoDecision::Kind::Park || rec.decision.kind == EgoDecision::Kind::Explore) {
        for (const auto & s : policy.active_plan()->states) {
          rec.new_plan.push_back(s.pose);
        }
      }

      rec.vacant = obs.vacant_spots;
      rec.occupied = obs.occupied_spots;
      for (const auto & v : obs.dynamic_vehicles) {
        rec.dynamic_seen.push_back(v.id);
      }
      rec.beliefs = beliefs.beliefs;
      for (const auto & vi : intents) {
        rec.intents.push_back({vi.vehicle, vi.dist.spot_probs, vi.dist.exploration_points, vi.dist.exploration_probs});
      }
      rec.predictions = std::move(predictions);
    }

    // Agents react to where the ego is now, then everyone moves.
    std::vector<VehicleControl> vehicle_controls(agents.size());
    std::vector<PedestrianControl> pedestrian_controls(agents.size());
    for (std::size_t i = 0; i < agents.size(); ++i) {
      bool braked = false;
      if (agents[i].kind == ScriptedAgent::Kind::Vehicle) {
        vehicle_controls[i] = reactive_step(agents[i], ego, dt, &braked);
      } else {
        pedestrian_controls[i] = reactive_pedestrian_step(agents[i], ego, dt, &braked);
      }
      rec.braked.push_back(braked);
    }
    ego = step_vehicle(ego, rec.decision.control, dt);
    ego_history.push_back(ego.pose);
    if (ego_history.size() > n_hist + 1) {
      ego_history.pop_front();
    }
    for (std::size_t i = 0; i < agents.size(); ++i) {
      auto & a = agents[i];
      if (a.kind == ScriptedAgent::Kind::Vehicle) {
        a.vehicle = step_vehicle(a.vehicle, vehicle_controls[i], dt);
        histories[i].push_back(a.vehicle.pose);
        if (histories[i].size() > n_hist + 1) {
          histories[i].pop_front();
        }
        if (log.agent_parked_at[i] < 0.0 && a.cursor >= a.plan_length) {
          log.agent_parked_at[i] = t + dt;
        }
      } else {
        a.pedestrian_previous = a.pedestrian.position;
        a.pedestrian = step_pedestrian(a.pedestrian, pedestrian_controls[i], dt);
      }
    }
    log.steps.push_back(std::move(rec));

    const OrientedRect fp = ego.footprint();
    std::string hit;
    if (!lot.boundary.contains(fp)) {
      hit = "boundary";
    }
    for (std::size_t i = 0; i < agents.size() && hit.empty(); ++i) {
      const auto & a = agents[i];
      const bool touch = a.kind == ScriptedAgent::Kind::Vehicle
                           ? obb_intersects(fp, a.vehicle.footprint())
                           : disc_rect_intersects(a.pedestrian.position, a.pedestrian.radius, fp);
      if (touch) {
        hit = std::string(a.kind == ScriptedAgent::Kind::Vehicle ? "vehicle:" : "pedestrian:") + std::to_string(a.id);
      }
    }
    for (const auto & s : sc.static_vehicles) {
      if (hit.empty() && obb_intersects(fp, s.footprint())) {
        hit = "static:" + std::to_string(containing_spot(s.footprint(), lot));
      }
    }
    if (!hit.empty()) {
      log.outcome = Outcome::Collision;
      log.collision_with = hit;
      log.t_end = t + dt;
      break;
    }
    if (policy.finished_parking()) {
      const int spot = policy.active_plan()->spot;
      if (obb_contains(lot.spots[spot], fp)) {
        log.outcome = Outcome::Parked;
        log.parked_spot = spot;
        log.t_end = t + dt;
        break;
      }
    }
  }
  log.final_ego = ego.pose;
  for (const auto & a : agents) {
    log.final_agents.push_back(agent_pose(a));
  }
  return log;
}

}  // namespace avp
