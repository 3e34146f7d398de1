#include "avp/policy.hpp"
#include "avp/scenario.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

using namespace avp;

TEST(CandidateEgoSpots, VacantAndBelowDelta)
{
  Observation obs;
  obs.vacant_spots = {1, 3, 4, 7};
  BeliefMap b{{0.0, 0.0, 0.0, 0.3, 0.31, 0.5, 0.0, 0.1}, 0.0};
  EXPECT_EQ(candidate_ego_spots(obs, b, 0.3), (std::vector<int>{1, 3, 7}));
  EXPECT_EQ(candidate_ego_spots(obs, b, 0.0), (std::vector<int>{1}));
}

TEST(EgoExplorationPoints, CircleCrossingsOfRoadCenterLines)
{
  const auto sl = make_standard_lot();
  VehicleState ego;
  ego.pose = {sl.middle_road_x(), 30.0, -std::numbers::pi / 2};
  const double r = 11.5;
  const auto pts = ego_exploration_points(sl.lot, ego, SensingRegion::disc(r));

  // Reference: roots of |s + t (e - s) - c| = r with t in [0, 1].
  std::vector<Vec2> expected;
  for (const auto & road : sl.lot.roads) {
    const Vec2 d = road.end - road.start;
    const Vec2 f = road.start - ego.pose.position();
    const double a = d.dot(d);
    const double b = 2.0 * f.dot(d);
    const double c = f.dot(f) - r * r;
    const double disc = b * b - 4 * a * c;
    if (disc < 0) {
      continue;
    }
    for (double t : {(-b - std::sqrt(disc)) / (2 * a), (-b + std::sqrt(disc)) / (2 * a)}) {
      if (t >= 0.0 && t <= 1.0) {
        expected.push_back(road.start + t * d);
      }
    }
  }
  ASSERT_FALSE(expected.empty());
  ASSERT_EQ(pts.size(), 2 * expected.size());
  for (const auto & e : expected) {
    const auto n = std::count_if(pts.begin(), pts.end(), [&](const ExplorationPoint & p) {
      return (p.pose.position() - e).norm() < 1e-6;
    });
    EXPECT_EQ(n, 2) << e.transpose();
  }
  bool seen_back = false;
  for (const auto & p : pts) {
    const bool front = ego.pose.heading().dot(p.pose.position() - ego.pose.position()) >= 0.0;
    EXPECT_EQ(p.front, front);
    if (!p.front) {
      seen_back = true;
    }
    EXPECT_FALSE(seen_back && p.front) << "front points come first";
  }
}

class PolicyTest : public ::testing::Test
{
protected:
  StandardLot sl = make_standard_lot();
  Observation obs;
  BeliefMap beliefs;
  VehicleState ego;

  void SetUp() override
  {
    ego.pose = sl.ego_start;
    beliefs = init_beliefs(sl.lot.n_spot());
  }

  DecisionInput input(double t)
  {
    DecisionInput in;
    in.time = t;
    in.ego = ego;
    in.obs = &obs;
    in.beliefs = &beliefs;
    in.lot = &sl.lot;
    in.region = SensingRegion::disc(11.5);
    return in;
  }

  void observe(std::vector<int> vacant)
  {
    obs.vacant_spots = std::move(vacant);
    beliefs = observation_update(init_beliefs(sl.lot.n_spot()), obs.vacant_spots, {});
  }
};

TEST_F(PolicyTest, ParksInNearestReachableSpotAndFinishes)
{
  const int near = StandardLot::spot_index(2, 5);
  const int far = StandardLot::spot_index(2, 1);
  observe({far, near});
  EgoPolicy policy(PolicyParams{});
  auto d = policy.decide(input(0.0));
  ASSERT_EQ(d.kind, EgoDecision::Kind::Park);
  EXPECT_GE(d.planner_calls, 1);
  const int chosen = d.spot;
  ASSERT_TRUE(chosen == near || chosen == far);
  const int steps = policy.active_plan()->steps();
  const ControlLimits limits;
  for (int k = 1; k <= steps + 2; ++k) {
    EXPECT_TRUE(limits.admits(d.control));
    ego = step_vehicle(ego, d.control, 0.1);
    if (k == steps) {
      EXPECT_TRUE(policy.finished_parking());
    }
    d = policy.decide(input(0.1 * k));
    if (k < steps) {
      EXPECT_EQ(d.kind, EgoDecision::Kind::Continue) << k;
      EXPECT_EQ(d.planner_calls, 0);
    }
  }
  for (const auto & c : oracle::corners(ego.pose, ego.length, ego.width)) {
    EXPECT_TRUE(oracle::inside(oracle::corners(sl.lot.spots[chosen]), c));
  }
}

TEST_F(PolicyTest, PriorityOrderWins)
{
  const int near = StandardLot::spot_index(2, 5);
  const int far = StandardLot::spot_index(2, 3);
  observe({far, near});
  EgoPolicy policy(PolicyParams{});
  auto in = input(0.0);
  in.priority = std::vector<int>{far, near};
  const auto d = policy.decide(in);
  ASSERT_EQ(d.kind, EgoDecision::Kind::Park);
  EXPECT_EQ(d.spot, far);
  EXPECT_EQ(d.planner_calls, 1);
}

TEST_F(PolicyTest, ExploresWithoutCandidates)
{
  observe({});
  EgoPolicy policy(PolicyParams{});
  const auto d = policy.decide(input(0.0));
  ASSERT_EQ(d.kind, EgoDecision::Kind::Explore);
  EXPECT_FALSE(d.control.is_zero());
  EXPECT_FALSE(policy.active_plan()->is_park());
}

TEST_F(PolicyTest, HighBeliefSpotIsNotACandidate)
{
  const int spot = StandardLot::spot_index(2, 5);
  observe({spot});
  beliefs.beliefs[spot] = 0.6;
  EgoPolicy policy(PolicyParams{});
  EXPECT_EQ(policy.decide(input(0.0)).kind, EgoDecision::Kind::Explore);
}

TEST_F(PolicyTest, DropsPlanWhenTargetBeliefRises)
{
  const int a = StandardLot::spot_index(2, 5);
  const int b = StandardLot::spot_index(2, 4);
  observe({a, b});
  EgoPolicy policy(PolicyParams{});
  auto in = input(0.0);
  in.priority = std::vector<int>{a, b};
  auto d = policy.decide(in);
  ASSERT_EQ(d.spot, a);
  ego = step_vehicle(ego, d.control, 0.1);
  beliefs.beliefs[a] = 0.4;
  in = input(0.1);
  in.priority = std::vector<int>{a, b};
  d = policy.decide(in);
  EXPECT_EQ(d.kind, EgoDecision::Kind::Park);
  EXPECT_EQ(d.spot, b);
}

TEST_F(PolicyTest, BlockedPlanIsReplanned)
{
  const int spot = StandardLot::spot_index(2, 5);
  observe({spot});
  EgoPolicy policy(PolicyParams{});
  auto d = policy.decide(input(0.0));
  ASSERT_EQ(d.kind, EgoDecision::Kind::Park);
  ego = step_vehicle(ego, d.control, 0.1);
  // A predicted vehicle parked on the plan's next state.
  PredictedTrajectory blocker;
  blocker.length = 4.97;
  blocker.width = 1.86;
  blocker.poses.assign(50, policy.active_plan()->states[2].pose);
  const std::vector<PredictedTrajectory> preds{blocker};
  auto in = input(0.1);
  in.predictions = preds;
  d = policy.decide(in);
  EXPECT_NE(d.kind, EgoDecision::Kind::Continue);
  EXPECT_GE(d.planner_calls, 1);
}

TEST(PolicyParamsValidation, RejectsBadPlanner)
{
  PolicyParams p;
  p.planner.dt = -1.0;
  EXPECT_THROW(EgoPolicy{p}, std::invalid_argument);
}
