#include "avp/sensing.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

using namespace avp;

namespace
{

constexpr double kHalfPi = std::numbers::pi / 2.0;

bool has(const std::vector<int> & v, int x) { return std::find(v.begin(), v.end(), x) != v.end(); }

// 60 x 60 lot, one road along y = 30 and a row of north-facing spots above it.
ParkingLot open_lot()
{
  ParkingLot lot;
  lot.boundary = {{0, 0}, {60, 60}};
  lot.entrance = {0, 30};
  lot.roads.push_back({{3.25, 30}, {56.75, 30}, 6.5});
  for (int i = 0; i < 20; ++i) {
    lot.spots.push_back({{1.5 + 2.7 * i + 1.35, 36.0}, kHalfPi, 5.5, 2.7});
  }
  lot.validate();
  return lot;
}

WorldSnapshot ego_only(const Pose2 & pose)
{
  WorldSnapshot w;
  VehicleState ego;
  ego.pose = pose;
  w.vehicles.push_back(ego);
  w.histories.push_back({pose});
  return w;
}

}  // namespace

TEST(Sense, EmptyLotRaysReachSensingBoundary)
{
  const auto lot = open_lot();
  const auto obs = sense(ego_only({30, 30, 0.3}), lot, SensingRegion::disc(11.5), 360);
  ASSERT_EQ(obs.rays.size(), 360u);
  for (const auto & r : obs.rays) {
    EXPECT_EQ(r.hit_kind, HitKind::SensingBoundary);
    EXPECT_NEAR((r.hit_point - r.origin).norm(), 11.5, 1e-9);
  }
  EXPECT_NEAR(std::atan2(obs.rays[0].direction.y(), obs.rays[0].direction.x()), 0.3, 1e-12);
  EXPECT_TRUE(obs.dynamic_vehicles.empty());
  EXPECT_TRUE(obs.static_vehicles.empty());
  EXPECT_TRUE(obs.occupied_spots.empty());
  // Spots wholly inside the disc are seen; spots wholly outside are not.
  for (int i = 0; i < lot.n_spot(); ++i) {
    double nearest = 1e9;
    double farthest = 0.0;
    for (const auto & c : lot.spots[i].corners()) {
      farthest = std::max(farthest, (c - Vec2(30, 30)).norm());
      nearest = std::min(nearest, (c - Vec2(30, 30)).norm());
    }
    if (farthest < 11.0) {
      EXPECT_TRUE(has(obs.vacant_spots, i)) << i;
    }
    if (nearest > 11.6) {
      EXPECT_FALSE(has(obs.vacant_spots, i)) << i;
    }
  }
}

TEST(Sense, ParkedVehicleOccludesSpotBehindIt)
{
  // A 6 m wide spot holding a wide vehicle, with a narrow spot right behind it. Every ray from
  // the ego to the narrow spot crosses |x - 20| <= 1.35 at y = 9.35, inside the vehicle's face.
  ParkingLot lot;
  lot.boundary = {{0, 0}, {40, 30}};
  lot.entrance = {0, 2};
  lot.roads.push_back({{2, 2}, {38, 2}, 4.0});
  lot.spots.push_back({{20, 12}, kHalfPi, 5.5, 6.0});
  lot.spots.push_back({{20, 17.5}, kHalfPi, 5.5, 2.7});
  lot.validate();

  auto w = ego_only({20, 3, kHalfPi});
  VehicleState parked;
  parked.pose = {20, 12, kHalfPi};
  parked.length = 5.3;
  parked.width = 5.8;
  w.vehicles.push_back(parked);
  w.histories.push_back({parked.pose});

  const auto obs = sense(w, lot, SensingRegion::disc(20.0), 360);
  ASSERT_EQ(obs.static_vehicles.size(), 1u);
  EXPECT_EQ(obs.static_vehicles[0].id, 1);
  EXPECT_TRUE(obs.dynamic_vehicles.empty());
  EXPECT_EQ(obs.occupied_spots, std::vector<int>{0});
  EXPECT_FALSE(has(obs.vacant_spots, 1));
  EXPECT_FALSE(has(obs.occupied_spots, 1));

  // Without the vehicle, the narrow spot is in view.
  const auto clear = sense(ego_only({20, 3, kHalfPi}), lot, SensingRegion::disc(20.0), 360);
  EXPECT_TRUE(has(clear.vacant_spots, 1));
}

TEST(Sense, DynamicVehicleCarriesHistory)
{
  const auto lot = open_lot();
  auto w = ego_only({20, 30, 0});
  VehicleState moving;
  moving.pose = {27, 30, 0};
  std::vector<Pose2> history;
  for (int k = 40; k >= 0; --k) {
    history.push_back({27 - 0.2 * k, 30, 0});
  }
  w.vehicles.push_back(moving);
  w.histories.push_back(history);
  const auto obs = sense(w, lot, SensingRegion::disc(11.5), 360);
  ASSERT_EQ(obs.dynamic_vehicles.size(), 1u);
  EXPECT_EQ(obs.dynamic_vehicles[0].history.size(), 41u);
  EXPECT_EQ(obs.dynamic_vehicles[0].pose().x, 27.0);
  ASSERT_NE(obs.find_dynamic(1), nullptr);
  EXPECT_EQ(obs.find_dynamic(2), nullptr);
}

TEST(Sense, VehicleOutsideRangeUnseen)
{
  const auto lot = open_lot();
  auto w = ego_only({10, 30, 0});
  VehicleState far;
  far.pose = {50, 30, 0};
  w.vehicles.push_back(far);
  w.histories.push_back({far.pose});
  const auto obs = sense(w, lot, SensingRegion::disc(11.5), 360);
  EXPECT_TRUE(obs.dynamic_vehicles.empty());
}

TEST(Sense, PedestriansSeenButDoNotOcclude)
{
  const auto lot = open_lot();
  auto w = ego_only({20, 30, 0});
  PedestrianState p;
  p.position = {24, 30};
  w.pedestrians.push_back(p);
  w.pedestrian_previous.push_back({23.9, 30});
  VehicleState behind;
  behind.pose = {29, 30, 0};
  w.vehicles.push_back(behind);
  w.histories.push_back({behind.pose});
  const auto obs = sense(w, lot, SensingRegion::disc(11.5), 360);
  ASSERT_EQ(obs.pedestrians.size(), 1u);
  EXPECT_EQ(obs.pedestrians[0].previous, Vec2(23.9, 30));
  EXPECT_EQ(obs.dynamic_vehicles.size(), 1u);
  EXPECT_EQ(obs.rays[0].hit_kind, HitKind::Vehicle);
}

TEST(Sense, DeterministicAndOcclusionMonotone)
{
  const auto lot = open_lot();
  auto w = ego_only({25, 30, 0.1});
  const auto a = sense(w, lot, SensingRegion::disc(11.5), 360);
  const auto b = sense(w, lot, SensingRegion::disc(11.5), 360);
  EXPECT_EQ(a.vacant_spots, b.vacant_spots);
  for (std::size_t r = 0; r < a.rays.size(); ++r) {
    EXPECT_EQ(a.rays[r].hit_point, b.rays[r].hit_point);
  }
  VehicleState blocker;
  blocker.pose = {28, 32, 0.4};
  w.vehicles.push_back(blocker);
  w.histories.push_back({blocker.pose});
  const auto c = sense(w, lot, SensingRegion::disc(11.5), 360);
  for (int i : c.vacant_spots) {
    EXPECT_TRUE(has(a.vacant_spots, i));
  }
  for (int i : c.occupied_spots) {
    EXPECT_TRUE(has(a.vacant_spots, i) || has(a.occupied_spots, i));
  }
}

TEST(Classify, Examples)
{
  const auto lot = open_lot();
  const auto & spot = lot.spots[3];
  EXPECT_EQ(classify_vehicle(OrientedRect::at(spot.pose(), 4.97, 1.86), lot), VehicleClass::Static);
  EXPECT_EQ(containing_spot(OrientedRect::at(spot.pose(), 4.97, 1.86), lot), 3);
  EXPECT_EQ(classify_vehicle(OrientedRect::at({20, 30, 0}, 4.97, 1.86), lot), VehicleClass::Dynamic);
  // Shifted 2.75 m along the spot: half of it hangs out into the road.
  const Pose2 half{spot.center.x(), spot.center.y() - 2.75, kHalfPi};
  EXPECT_EQ(classify_vehicle(OrientedRect::at(half, 4.97, 1.86), lot), VehicleClass::Dynamic);
  EXPECT_EQ(containing_spot(OrientedRect::at(half, 4.97, 1.86), lot), -1);
}
