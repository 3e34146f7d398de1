#include "avp/intention.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

using namespace avp;

namespace
{

constexpr double kPi = std::numbers::pi;

// Road along y = 30 across a 120 m lot, north-facing spots above it.
ParkingLot strip_lot()
{
  ParkingLot lot;
  lot.boundary = {{0, 0}, {120, 60}};
  lot.entrance = {0, 30};
  lot.roads.push_back({{3.25, 30}, {116.75, 30}, 6.5});
  for (int i = 0; i < 40; ++i) {
    lot.spots.push_back({{2.0 + 2.7 * i + 1.35, 36.0}, kPi / 2, 5.5, 2.7});
  }
  lot.validate();
  return lot;
}

ObservedVehicle observed(int id, const std::vector<Pose2> & history)
{
  ObservedVehicle v;
  v.id = id;
  v.length = 4.97;
  v.width = 1.86;
  v.history = history;
  return v;
}

int nearest_spot(const ParkingLot & lot, const Vec2 & p)
{
  int best = 0;
  for (int i = 1; i < lot.n_spot(); ++i) {
    if ((lot.spots[i].center - p).norm() < (lot.spots[best].center - p).norm()) {
      best = i;
    }
  }
  return best;
}

}  // namespace

TEST(CandidateSpots, Examples)
{
  const auto lot = strip_lot();
  IntentionParams p;
  const Pose2 vehicle{50, 30, 0};
  EXPECT_TRUE(candidate_spots_for(vehicle, lot, init_beliefs(lot.n_spot()), p).empty());

  BeliefMap b = init_beliefs(lot.n_spot());
  const int near = nearest_spot(lot, {50, 36});
  b.beliefs[near] = 0.0;
  EXPECT_EQ(candidate_spots_for(vehicle, lot, b, p), std::vector<int>{near});

  // 30 m along the road is outside the 20 m half-window.
  const int far = nearest_spot(lot, {80, 36});
  b.beliefs[far] = 0.0;
  EXPECT_EQ(candidate_spots_for(vehicle, lot, b, p), std::vector<int>{near});
}

TEST(Features, Examples)
{
  const auto lot = strip_lot();
  const auto v = observed(1, {{0, 0, 0}, {0, 0, 0}});
  const auto f = compute_features(v, {3, 4}, lot, 0.1, 1.0, 3.5);
  EXPECT_NEAR(f.d, 5.0, 1e-12);
  EXPECT_NEAR(f.a, 0.6, 1e-12);
  EXPECT_EQ(f.v_bar, 0.0);
  EXPECT_NEAR(f.d_ent, 30.0, 1e-12);
  EXPECT_NEAR(f.t_lot, 2.5, 1e-12);
  EXPECT_NEAR(compute_features(v, {7, 0}, lot, 0.1, 0, 0).a, 1.0, 1e-12);
  EXPECT_NEAR(compute_features(v, {-7, 0}, lot, 0.1, 0, 0).a, -1.0, 1e-12);
  EXPECT_EQ(compute_features(v, {0, 0}, lot, 0.1, 0, 0).a, 1.0);

  const auto moving = observed(2, {{0, 0, 0}, {0.2, 0, 0}, {0.4, 0, 0}});
  EXPECT_NEAR(compute_features(moving, {5, 0}, lot, 0.1, 0, 0).v_bar, 2.0, 1e-12);
}

TEST(ExplorationCandidates, StraightRoadThroughWindow)
{
  const auto lot = strip_lot();
  auto pts = exploration_candidates_for({50, 30, 0}, lot, 40.0);
  // Window edges ahead and behind on the center line, both travel directions.
  ASSERT_EQ(pts.size(), 4u);
  std::sort(pts.begin(), pts.end(), [](const Pose2 & a, const Pose2 & b) {
    return std::tie(a.x, a.theta) < std::tie(b.x, b.theta);
  });
  EXPECT_NEAR(pts[0].x, 30.0, 1e-9);
  EXPECT_NEAR(pts[2].x, 70.0, 1e-9);
  for (const auto & p : pts) {
    EXPECT_NEAR(p.y, 30.0, 1e-9);
  }
  EXPECT_NEAR(std::abs(normalize_angle(pts[0].theta - pts[1].theta)), kPi, 1e-9);
}

TEST(ExplorationCandidates, RoadEndingInsideWindow)
{
  const auto lot = strip_lot();
  // Near the west end the road stops inside the window: only the far edge remains.
  const auto pts = exploration_candidates_for({8, 30, 0}, lot, 40.0);
  ASSERT_EQ(pts.size(), 2u);
  EXPECT_NEAR(pts[0].x, 28.0, 1e-9);
}

TEST(ExplorationCandidates, NoRoadInWindow)
{
  ParkingLot lot = strip_lot();
  lot.boundary.max.y() = 120;
  EXPECT_TRUE(exploration_candidates_for({50, 100, 0}, lot, 40.0).empty());
}

TEST(HeuristicScorer, NormalizationSymmetryMonotonicity)
{
  HeuristicScorer s;
  ScoringRequest one;
  one.vehicle = 1;
  one.spots = {4};
  one.spot_features = {{5.0, 0.5, 1.0, 10.0, 2.0}};
  const auto d1 = s.score(one);
  ASSERT_EQ(d1.spot_probs.size(), 1u);
  EXPECT_DOUBLE_EQ(d1.spot_probs[0].second, 1.0);

  ScoringRequest two = one;
  two.spots = {4, 7};
  two.spot_features = {one.spot_features[0], one.spot_features[0]};
  const auto d2 = s.score(two);
  EXPECT_DOUBLE_EQ(d2.spot_probs[0].second, d2.spot_probs[1].second);

  ScoringRequest ab = one;
  ab.spots = {0, 1};
  ab.spot_features = {{2.0, 1.0, 1.0, 0, 0}, {20.0, -1.0, 1.0, 0, 0}};
  ab.exploration_points = {{10, 0, 0}, {-10, 0, kPi}};
  const auto dab = s.score(ab);
  EXPECT_GT(dab.spot_probs[0].second, dab.spot_probs[1].second);
  EXPECT_NEAR(dab.total(), 1.0, 1e-9);

  // Monotone in d and a: the documented logit decreases in d and increases in a.
  HeuristicWeights w;
  auto logit = [&](double d, double a, double v) {
    return w.w_d * (1.0 - d / w.d_max) + w.w_a * a + w.w_v * std::exp(-v / w.v0);
  };
  EXPECT_DOUBLE_EQ(s.spot_logit({3.0, 0.2, 1.5, 0, 0}), logit(3.0, 0.2, 1.5));
  EXPECT_GT(s.spot_logit({2.0, 0.2, 1.5, 0, 0}), s.spot_logit({3.0, 0.2, 1.5, 0, 0}));
  EXPECT_GT(s.spot_logit({3.0, 0.4, 1.5, 0, 0}), s.spot_logit({3.0, 0.2, 1.5, 0, 0}));

  ScoringRequest none;
  EXPECT_THROW(s.score(none), std::invalid_argument);
}

class Bev : public ::testing::Test
{
protected:
  void SetUp() override
  {
    lot = strip_lot();
    beliefs = init_beliefs(lot.n_spot());
    for (auto & b : beliefs.beliefs) {
      b = 0.0;
    }
    obs.dynamic_vehicles.push_back(observed(1, {{50, 30, 0}}));
    // Nothing observed, so spots keep their beliefs.
    ctx = {&lot, &beliefs, &obs, {{100, 30, 0}}, 4.97, 1.86};
  }

  ParkingLot lot;
  BeliefMap beliefs;
  Observation obs;
  BevContext ctx;
  IntentionParams params;
};

TEST_F(Bev, OnlyMarkingsAndTargetWithoutOthers)
{
  const auto bev = reconstruct_bev(ctx, 1, std::nullopt, params);
  ASSERT_EQ(bev.rows(), 400);
  const auto target = OrientedRect::at({50, 30, 0}, 4.97, 1.86);
  for (int r = 0; r < bev.rows(); ++r) {
    for (int c = 0; c < bev.cols(); ++c) {
      if (bev.channels[1](r, c) > 0.0f) {
        EXPECT_TRUE(target.contains(bev.cell_center(r, c), 1e-9)) << r << "," << c;
      }
      EXPECT_EQ(bev.channels[2](r, c), 0.0f);
    }
  }
  EXPECT_GT(bev.channels[0].sum(), 0.0f);
  EXPECT_THROW(reconstruct_bev(ctx, 9, std::nullopt, params), std::invalid_argument);
}

TEST_F(Bev, PhantomVehicleAboveBeta)
{
  const int spot = nearest_spot(lot, {55, 36});
  beliefs.beliefs[spot] = 0.6;
  const auto with = reconstruct_bev(ctx, 1, std::nullopt, params);
  beliefs.beliefs[spot] = 0.4;
  const auto without = reconstruct_bev(ctx, 1, std::nullopt, params);
  const auto phantom = OrientedRect::at(lot.spots[spot].pose(), 4.97, 1.86);
  int cells = 0;
  for (int r = 0; r < with.rows(); ++r) {
    for (int c = 0; c < with.cols(); ++c) {
      const bool inside = phantom.contains(with.cell_center(r, c), -1e-6);
      if (inside) {
        ++cells;
        EXPECT_EQ(with.channels[1](r, c), 1.0f);
      }
      if (with.channels[1](r, c) != without.channels[1](r, c)) {
        EXPECT_TRUE(phantom.contains(with.cell_center(r, c), 1e-6));
      }
    }
  }
  // 4.97 x 1.86 m at 0.1 m cells.
  EXPECT_NEAR(cells, 49 * 18, 120);
  EXPECT_EQ(without.channels[0], with.channels[0]);
}

TEST_F(Bev, MarkedDiffersOnlyInThirdChannelAndOutOfWindowIgnored)
{
  const int spot = nearest_spot(lot, {45, 36});
  const auto plain = reconstruct_bev(ctx, 1, std::nullopt, params);
  const auto marked = reconstruct_bev(ctx, 1, spot, params);
  EXPECT_EQ(plain.channels[0], marked.channels[0]);
  EXPECT_EQ(plain.channels[1], marked.channels[1]);
  EXPECT_GT(marked.channels[2].sum(), 0.0f);

  beliefs.beliefs[nearest_spot(lot, {100, 36})] = 1.0;
  const auto again = reconstruct_bev(ctx, 1, std::nullopt, params);
  for (int ch = 0; ch < 3; ++ch) {
    EXPECT_EQ(again.channels[ch], plain.channels[ch]);
  }
}

TEST(EstimateIntentions, DistributionSumsToOne)
{
  const auto lot = strip_lot();
  BeliefMap beliefs = init_beliefs(lot.n_spot());
  for (int i = 10; i < 25; ++i) {
    beliefs.beliefs[i] = 0.0;
  }
  Observation obs;
  obs.dynamic_vehicles.push_back(observed(3, {{45, 30, 0}, {45.2, 30, 0}, {45.4, 30, 0}}));
  BevContext ctx{&lot, &beliefs, &obs, {{10, 30, 0}}, 4.97, 1.86};
  HeuristicScorer scorer;
  const auto intents = estimate_intentions(ctx, {{3, 0.0}}, 1.0, scorer, {});
  ASSERT_EQ(intents.size(), 1u);
  EXPECT_EQ(intents[0].vehicle, 3);
  EXPECT_NEAR(intents[0].v_bar, 2.0, 1e-12);
  EXPECT_NEAR(intents[0].dist.total(), 1.0, 1e-9);
  for (const auto & [s, p] : intents[0].dist.spot_probs) {
    EXPECT_LT(beliefs[s], 0.5);
    EXPECT_GE(p, 0.0);
    EXPECT_LE(p, 1.0);
  }
}
