#include "avp/simulation.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace avp;

namespace
{

SimConfig config_for(Method m, std::uint64_t seed, bool reactive = true)
{
  SimConfig c;
  c.method = m;
  c.scenario.seed = seed;
  c.scenario.reactive = reactive;
  c.prediction.method = trajectory_method(m);
  return c;
}

// Reference check of a finished episode: no recorded ego pose overlaps a parked car or a
// scripted vehicle unless the episode ended in a collision, and a parked ego sits inside its spot.
void expect_consistent(const Scenario & sc, const EpisodeLog & log)
{
  ASSERT_FALSE(log.steps.empty());
  const double L = sc.ego.length;
  const double W = sc.ego.width;
  const std::size_t checked = log.outcome == Outcome::Collision ? log.steps.size() - 1 : log.steps.size();
  for (std::size_t k = 0; k < checked; ++k) {
    const auto & st = log.steps[k];
    const auto ego = oracle::corners(st.ego, L, W);
    for (const auto & car : sc.static_vehicles) {
      EXPECT_FALSE(oracle::quads_overlap(ego, oracle::corners(car.pose, car.length, car.width))) << k;
    }
    for (std::size_t i = 0; i < sc.agents.size(); ++i) {
      const auto & a = sc.agents[i];
      if (a.kind == ScriptedAgent::Kind::Vehicle) {
        EXPECT_FALSE(oracle::quads_overlap(ego, oracle::corners(st.agents[i], a.vehicle.length, a.vehicle.width)))
          << k;
      }
    }
  }
  if (log.outcome == Outcome::Parked) {
    ASSERT_GE(log.parked_spot, 0);
    for (const auto & c : oracle::corners(log.final_ego, L, W)) {
      EXPECT_TRUE(oracle::inside(oracle::corners(sc.layout.lot.spots[log.parked_spot]), c));
    }
  }
}

}  // namespace

TEST(Simulation, EveryMethodRunsAnEpisode)
{
  for (Method m : all_methods()) {
    const auto cfg = config_for(m, 3);
    const auto sc = generate_scenario_reseeding(cfg.scenario);
    const auto log = run_episode(sc, cfg);
    EXPECT_NE(log.outcome, Outcome::Error) << to_string(m);
    EXPECT_EQ(log.method, m);
    EXPECT_LE(log.t_end, cfg.scenario.t_f + 1e-9);
    EXPECT_EQ(log.selection_seconds.size(), log.steps.size());
    EXPECT_EQ(log.final_agents.size(), sc.agents.size());
    expect_consistent(sc, log);
  }
}

TEST(Simulation, Deterministic)
{
  const auto cfg = config_for(Method::ExplicitPastBezier, 11);
  const auto sc = generate_scenario_reseeding(cfg.scenario);
  const auto a = run_episode(sc, cfg);
  const auto b = run_episode(sc, cfg);
  ASSERT_EQ(a.steps.size(), b.steps.size());
  for (std::size_t k = 0; k < a.steps.size(); ++k) {
    EXPECT_EQ(a.steps[k].ego.x, b.steps[k].ego.x);
    EXPECT_EQ(a.steps[k].ego.y, b.steps[k].ego.y);
    EXPECT_EQ(a.steps[k].ego.theta, b.steps[k].ego.theta);
    EXPECT_EQ(a.steps[k].beliefs, b.steps[k].beliefs);
  }
  EXPECT_EQ(a.outcome, b.outcome);
  EXPECT_EQ(a.parked_spot, b.parked_spot);
}

TEST(Simulation, ParkedEpisodesAreConsistent)
{
  for (std::uint64_t seed : {1u, 2u, 5u}) {
    for (bool reactive : {true, false}) {
      const auto cfg = config_for(Method::ExplicitPastBezier, seed, reactive);
      const auto sc = generate_scenario_reseeding(cfg.scenario);
      const auto log = run_episode(sc, cfg);
      expect_consistent(sc, log);
    }
  }
}

TEST(Simulation, IdleEgoNeverMoves)
{
  auto cfg = config_for(Method::ImplicitEgoOnly, 4);
  cfg.idle_ego = true;
  cfg.scenario.t_f = 20.0;
  const auto sc = generate_scenario_reseeding(cfg.scenario);
  const auto log = run_episode(sc, cfg);
  EXPECT_NE(log.outcome, Outcome::Parked);
  for (const auto & st : log.steps) {
    EXPECT_EQ(st.ego.x, sc.ego.pose.x);
    EXPECT_EQ(st.ego.y, sc.ego.pose.y);
  }
}

TEST(Simulation, MethodNames)
{
  for (Method m : all_methods()) {
    EXPECT_EQ(parse_method(to_string(m)), m);
  }
  EXPECT_THROW(parse_method("nope"), std::invalid_argument);
}
