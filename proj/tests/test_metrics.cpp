#include "avp/metrics.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace avp;

namespace
{

std::vector<Vec2> line(int n, const Vec2 & start, const Vec2 & step)
{
  std::vector<Vec2> out;
  for (int k = 0; k < n; ++k) {
    out.push_back(start + (k + 1) * step);
  }
  return out;
}

double dist(const Vec2 & a, const Vec2 & b)
{
  const double dx = a.x() - b.x();
  const double dy = a.y() - b.y();
  return std::sqrt(dx * dx + dy * dy);
}

// Exhaustive: evaluate every prediction on its own, then take both minima.
DisplacementError brute_force(const std::vector<std::vector<Vec2>> & preds, const std::vector<Vec2> & truth)
{
  double best_ade = INFINITY;
  double best_fde = INFINITY;
  for (const auto & p : preds) {
    const std::size_t n = std::min(p.size(), truth.size());
    if (n == 0) {
      continue;
    }
    double sum = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      sum += dist(p[k], truth[k]);
    }
    best_ade = std::min(best_ade, sum / n);
    best_fde = std::min(best_fde, dist(p[n - 1], truth[n - 1]));
  }
  return {best_ade, best_fde};
}

// Two-agent log: agent 0 is a vehicle targeting spot 7, agent 1 a pedestrian.
EpisodeLog two_agent_log(int n_steps)
{
  EpisodeLog log;
  log.agent_ids = {1, 2};
  log.agent_is_vehicle = {true, false};
  log.agent_targets = {7, -1};
  log.agent_parked_at = {-1.0, -1.0};
  for (int k = 0; k < n_steps; ++k) {
    StepRecord s;
    s.time = 0.1 * k;
    s.agents = {Pose2{1.0 * k, 0.0, 0.0}, Pose2{0.0, 0.0, 0.0}};
    s.braked = {false, false};
    log.steps.push_back(s);
    log.selection_seconds.push_back(0.01);
  }
  log.final_agents = {Pose2{1.0 * n_steps, 0.0, 0.0}, Pose2{0.0, 0.0, 0.0}};
  log.t_end = 0.1 * n_steps;
  return log;
}

}  // namespace

TEST(MinAdeFde, Examples)
{
  const auto truth = line(10, {0, 0}, {1, 0});
  const std::vector<std::vector<Vec2>> same{truth};
  auto e = min_ade_fde(same, truth);
  EXPECT_DOUBLE_EQ(e.ade, 0.0);
  EXPECT_DOUBLE_EQ(e.fde, 0.0);

  const std::vector<std::vector<Vec2>> shifted{line(10, {1, 0}, {1, 0})};
  e = min_ade_fde(shifted, truth);
  EXPECT_DOUBLE_EQ(e.ade, 1.0);
  EXPECT_DOUBLE_EQ(e.fde, 1.0);

  // A has per-step errors {0, 1, 5}: ADE 2, FDE 5. B has {4, 4, 1}: ADE 3, FDE 1.
  const std::vector<Vec2> origin(3, Vec2{0, 0});
  const std::vector<std::vector<Vec2>> two{{{0, 0}, {1, 0}, {3, 4}}, {{0, 4}, {4, 0}, {0, 1}}};
  e = min_ade_fde(two, origin);
  EXPECT_DOUBLE_EQ(e.ade, 2.0);
  EXPECT_DOUBLE_EQ(e.fde, 1.0);
}

TEST(MinAdeFde, HorizonIsShorterOfTheTwo)
{
  const auto truth = line(5, {0, 0}, {1, 0});
  const std::vector<std::vector<Vec2>> longer{line(20, {0, 1}, {1, 0})};
  const auto e = min_ade_fde(longer, truth);
  EXPECT_DOUBLE_EQ(e.ade, 1.0);
  EXPECT_DOUBLE_EQ(e.fde, 1.0);
}

TEST(MinAdeFde, Errors)
{
  const auto truth = line(5, {0, 0}, {1, 0});
  EXPECT_THROW(min_ade_fde(std::span<const std::vector<Vec2>>{}, truth), std::invalid_argument);
  const std::vector<std::vector<Vec2>> empty_pred{{}};
  EXPECT_THROW(min_ade_fde(empty_pred, truth), std::invalid_argument);
}

TEST(MinAdeFde, MatchesBruteForceAndIsMonotone)
{
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<int> n_pred(1, 5);
  std::uniform_int_distribution<int> n_step(1, 20);
  std::uniform_real_distribution<double> coord(-10.0, 10.0);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<Vec2> truth(n_step(rng));
    for (auto & p : truth) {
      p = {coord(rng), coord(rng)};
    }
    std::vector<std::vector<Vec2>> preds(n_pred(rng));
    for (auto & pr : preds) {
      pr.resize(n_step(rng));
      for (auto & p : pr) {
        p = {coord(rng), coord(rng)};
      }
    }
    const auto got = min_ade_fde(preds, truth);
    const auto ref = brute_force(preds, truth);
    EXPECT_EQ(got.ade, ref.ade);
    EXPECT_EQ(got.fde, ref.fde);
    if (preds.size() > 1) {
      const std::vector<std::vector<Vec2>> fewer(preds.begin(), preds.end() - 1);
      const auto sub = min_ade_fde(fewer, truth);
      EXPECT_LE(got.ade, sub.ade);
      EXPECT_LE(got.fde, sub.fde);
    }
  }
}

TEST(EpisodeMetrics, SuccessAndParkingTime)
{
  auto log = two_agent_log(201);
  log.outcome = Outcome::Parked;
  log.parked_spot = 3;
  log.t_end = 20.1;
  const auto m = episode_metrics(log);
  EXPECT_TRUE(m.success);
  ASSERT_TRUE(m.t_park.has_value());
  EXPECT_DOUBLE_EQ(*m.t_park, 20.1);
  EXPECT_FALSE(m.stolen);

  log.outcome = Outcome::Collision;
  const auto c = episode_metrics(log);
  EXPECT_FALSE(c.success);
  EXPECT_FALSE(c.t_park.has_value());
}

TEST(EpisodeMetrics, Stealing)
{
  auto log = two_agent_log(50);
  log.outcome = Outcome::Parked;
  log.parked_spot = 7;
  EXPECT_TRUE(episode_metrics(log).stolen);
  // Parked after the ego finished: still stolen.
  log.agent_parked_at[0] = log.t_end + 1.0;
  EXPECT_TRUE(episode_metrics(log).stolen);
  // The vehicle had already parked there: not a takeover.
  log.agent_parked_at[0] = 1.0;
  EXPECT_FALSE(episode_metrics(log).stolen);
  // A pedestrian "target" never counts.
  log.agent_is_vehicle = {false, false};
  log.agent_parked_at[0] = -1.0;
  EXPECT_FALSE(episode_metrics(log).stolen);
}

TEST(EpisodeMetrics, InterruptionsSumBrakedFlags)
{
  auto log = two_agent_log(10);
  for (int k : {1, 2, 3}) {
    log.steps[k].braked[0] = true;
  }
  for (int k : {4, 5}) {
    log.steps[k].braked[1] = true;
  }
  EXPECT_EQ(episode_metrics(log).interrupted_steps, 5);
}

TEST(EpisodeMetrics, TimingsAndPredictionEvents)
{
  auto log = two_agent_log(10);
  log.planning_seconds = {0.2, 0.4};
  log.planning_calls = 3;
  // At step 2 the vehicle (x = 2, moving +1 per step) gets an exact and an offset prediction;
  // at step 5 a single 2 m-offset one. Pedestrian predictions are ignored.
  PredictedTrajectory exact;
  exact.agent_id = 1;
  for (int j = 1; j <= 3; ++j) {
    exact.poses.push_back({2.0 + j, 0.0, 0.0});
  }
  auto offset = exact;
  for (auto & p : offset.poses) {
    p.y = 1.0;
  }
  log.steps[2].predictions = {exact, offset};
  PredictedTrajectory later;
  later.agent_id = 1;
  for (int j = 1; j <= 30; ++j) {
    later.poses.push_back({5.0 + j, 2.0, 0.0});
  }
  PredictedTrajectory ped;
  ped.agent_id = 2;
  ped.agent = PredictedTrajectory::Agent::Pedestrian;
  ped.poses.assign(5, Pose2{50, 50, 0});
  log.steps[5].predictions = {later, ped};
  const auto m = episode_metrics(log);
  EXPECT_NEAR(m.spot_selection_time, 0.01, 1e-15);
  EXPECT_NEAR(m.path_planning_time, 0.2, 1e-15);
  EXPECT_EQ(m.prediction_events, 2);
  ASSERT_TRUE(m.min_ade && m.min_fde);
  EXPECT_DOUBLE_EQ(*m.min_ade, 1.0);
  EXPECT_DOUBLE_EQ(*m.min_fde, 1.0);
}

TEST(Aggregate, Examples)
{
  std::vector<EpisodeMetrics> rows(500);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    rows[i].success = i != 17;
    if (rows[i].success) {
      rows[i].t_park = 20.0;
    }
  }
  auto s = aggregate(rows);
  EXPECT_EQ(s.episodes, 500);
  EXPECT_NEAR(s.success_rate, 99.8, 1e-12);
  EXPECT_DOUBLE_EQ(s.t_park.std, 0.0);
  EXPECT_EQ(s.t_park.n, 499);

  std::vector<EpisodeMetrics> two(2);
  two[0].success = two[1].success = true;
  two[0].t_park = 10.0;
  two[1].t_park = 30.0;
  s = aggregate(two);
  EXPECT_DOUBLE_EQ(s.t_park.mean, 20.0);
  EXPECT_NEAR(s.t_park.std, 14.142, 5e-4);
  EXPECT_NEAR(s.t_park.std, std::sqrt(200.0), 1e-12);

  EXPECT_THROW(aggregate(std::span<const EpisodeMetrics>{}), std::invalid_argument);
}

TEST(Aggregate, SingleRowReproducesIt)
{
  EpisodeMetrics m;
  m.success = true;
  m.stolen = true;
  m.interrupted_steps = 4;
  m.t_park = 22.5;
  m.min_ade = 1.5;
  m.min_fde = 2.5;
  const std::vector<EpisodeMetrics> one{m};
  const auto s = aggregate(one);
  EXPECT_DOUBLE_EQ(s.success_rate, 100.0);
  EXPECT_DOUBLE_EQ(s.stolen_rate, 100.0);
  EXPECT_DOUBLE_EQ(s.interrupted.mean, 4.0);
  EXPECT_DOUBLE_EQ(s.t_park.mean, 22.5);
  EXPECT_DOUBLE_EQ(s.min_ade.mean, 1.5);
  EXPECT_DOUBLE_EQ(s.min_fde.mean, 2.5);
  EXPECT_DOUBLE_EQ(s.min_fde.std, 0.0);
}

TEST(MetricsCsv, ColumnCountsMatchHeaders)
{
  auto count = [](const std::string & s) { return std::count(s.begin(), s.end(), ','); };
  EpisodeMetrics m;
  m.error = "bad, very bad";
  EXPECT_EQ(count(episode_csv_row(m)), count(episode_csv_header()));
  EXPECT_EQ(count(timing_csv_row(m)), count(timing_csv_header()));
  const std::vector<EpisodeMetrics> one{m};
  const auto s = aggregate(one);
  EXPECT_EQ(count(summary_csv_row(s)), count(summary_csv_header()));
  EXPECT_EQ(count(timing_summary_csv_row(s)), count(timing_summary_csv_header()));
}
