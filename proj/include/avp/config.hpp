#pragma once

#include "avp/simulation.hpp"

#include <nlohmann/json_fwd.hpp>

#include <memory>
#include <string>
#include <vector>

namespace avp
{

struct ScorerSelection
{
  enum class Kind { Heuristic, External };

  Kind kind{Kind::Heuristic};
  /// Shell command of the external scorer process.
  std::string command;
  double timeout{1.0};
  HeuristicWeights weights;
};

/*
 * Experiment file schema (JSON). Every key is optional and an empty object gives the defaults
 * below; unknown keys are rejected.
 *
 *   {
 *     "method": "explicit-past-bezier",   (or a list of method names)
 *     "episodes": 500, "seed": 0, "reactive": true, "both_modes": false,
 *     "t_f": 100, "sensing_radius": 11.5, "n_ray": 360, "t_hist": 4,
 *     "l_def": 4.97, "w_def": 1.86, "beta": 0.5, "mu": 0.3, "zeta": 3, "delta": 0.3,
 *     "dt": 0.1, "t_pred": 3, "t_plan": 5,
 *     "bezier_start_tangent": "as-paper" | "forward",
 *     "n_dynamic": 0, "passiveness_min": 2, "passiveness_max": 6, "n_pedestrians": 0,
 *     "max_candidates": 5,
 *     "planner": {<PlannerConfig field>: value, ...},
 *     "scorer": {"kind": "heuristic" | "external", "command": "...", "timeout": 1,
 *                "weights": {"w_d": 2, "w_a": 1.5, "w_v": 0.5, "w_e": 1, "d_max": 20, "v0": 2, "v_max": 5}},
 *     "out": "out", "workers": 0
 *   }
 *
 * n_dynamic 0 draws one or two dynamic vehicles per scenario. workers 0 uses every core.
 */
struct ExperimentConfig
{
  std::vector<Method> methods{Method::ExplicitPastBezier};
  int episodes{500};
  std::uint64_t seed{0};
  bool reactive{true};
  /// Batches run reactive and non-reactive agents.
  bool both_modes{false};

  double t_f{100.0};
  double sensing_radius{11.5};
  int n_ray{360};
  double t_hist{4.0};
  double l_def{4.97};
  double w_def{1.86};
  double beta{0.5};
  double mu{0.3};
  double zeta{3.0};
  double delta{0.3};
  double dt{0.1};
  double t_pred{3.0};
  double t_plan{5.0};
  BezierStartTangent start_tangent{BezierStartTangent::AsPaper};

  int n_dynamic{0};
  int passiveness_min{2};
  int passiveness_max{6};
  int n_pedestrians{0};
  int max_candidates{5};

  PlannerConfig planner;
  ScorerSelection scorer;
  std::string out{"out"};
  int workers{0};

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;

  SimConfig sim_config(Method method, std::uint64_t seed, bool reactive) const;
  ScenarioConfig scenario_config(std::uint64_t seed, bool reactive) const;
  /// Null for the heuristic scorer, which run_episode builds itself.
  std::unique_ptr<IntentionScorer> make_scorer() const;
};

/// Parses and validates. Errors name the offending field.
ExperimentConfig config_from_json(const nlohmann::json & j);
nlohmann::json config_to_json(const ExperimentConfig & cfg);
ExperimentConfig load_config(const std::string & path);

}  // namespace avp
