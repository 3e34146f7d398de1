#pragma once

#include "avp/intention.hpp"
#include "avp/policy.hpp"
#include "avp/prediction.hpp"
#include "avp/scenario.hpp"

#include <optional>
#include <string>
#include <vector>

namespace avp
{

/// Spot-selection method. All share the planner and policy shell.
enum class Method { ExplicitPastBezier, ExplicitPastCv, ExplicitPastPlanner, ImplicitEgoOnly, ExplicitFuture };

const char * to_string(Method m);
/// Throws std::invalid_argument on an unknown name.
Method parse_method(const std::string & name);
std::vector<Method> all_methods();
TrajectoryMethod trajectory_method(Method m);

struct SimConfig
{
  Method method{Method::ExplicitPastBezier};
  ScenarioConfig scenario;
  SensingRegion region{SensingRegion::disc(11.5)};
  int n_ray{360};
  IntentionParams intention;
  HeuristicWeights scorer_weights;
  PredictionParams prediction;
  PolicyParams policy;
  /// Replace the policy with one that never moves.
  bool idle_ego{false};
};

struct LoggedIntent
{
  int vehicle{-1};
  std::vector<std::pair<int, double>> spots;
  std::vector<Pose2> exploration_points;
  std::vector<double> exploration_probs;
};

struct StepRecord
{
  double time{0.0};
  Pose2 ego;
  /// Scripted agents in scenario order: vehicle poses, pedestrians as (x, y, 0).
  std::vector<Pose2> agents;
  std::vector<bool> braked;
  std::vector<int> vacant;
  std::vector<int> occupied;
  std::vector<int> dynamic_seen;
  std::vector<double> beliefs;
  std::vector<LoggedIntent> intents;
  std::vector<PredictedTrajectory> predictions;
  EgoDecision decision;
  /// States of a plan adopted at this step.
  std::vector<Pose2> new_plan;
};

/// Error marks an episode that threw; batches record it as a failure.
enum class Outcome { Parked, Collision, Timeout, Error };
const char * to_string(Outcome o);

struct EpisodeLog
{
  std::uint64_t seed{0};
  Method method{Method::ExplicitPastBezier};
  bool reactive{true};
  std::vector<StepRecord> steps;
  /// Agent poses after the last step, so every step's future is known.
  Pose2 final_ego;
  std::vector<Pose2> final_agents;
  Outcome outcome{Outcome::Timeout};
  int parked_spot{-1};
  double t_end{0.0};
  /// Who the ego hit: "vehicle:<id>", "static:<spot>", "pedestrian:<id>" or "boundary".
  std::string collision_with;
  /// Per-agent target spot and the time it parked (negative if never).
  std::vector<int> agent_targets;
  std::vector<double> agent_parked_at;
  std::vector<int> agent_ids;
  std::vector<bool> agent_is_vehicle;
  /// Seconds per step in spot selection, and per planner-calling step in path planning.
  std::vector<double> selection_seconds;
  std::vector<double> planning_seconds;
  int planning_calls{0};
};

/// Runs one episode to parking, collision or t_f. `scorer` may be null for the heuristic scorer.
EpisodeLog run_episode(const Scenario & scenario, const SimConfig & config, IntentionScorer * scorer = nullptr);

/// Occupancy a spot gets from trajectories whose footprint center enters it within t_pred:
/// 1 - t_arrival / (t_pred + dt) per trajectory, combined as 1 - prod(1 - p).
double future_occupancy(
  const OrientedRect & spot, std::span<const PredictedTrajectory> predictions, double t_pred, double dt);

}  // namespace avp
