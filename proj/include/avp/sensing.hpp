#pragma once

#include "avp/dynamics.hpp"
#include "avp/geometry.hpp"

#include <vector>

namespace avp
{

/// Ground-truth state of every agent at one timestep. Vehicle 0 is the ego.
struct WorldSnapshot
{
  double time{0.0};
  std::vector<VehicleState> vehicles;
  /// Per vehicle, poses over the past t_hist seconds, oldest first; the last entry is the current pose.
  std::vector<std::vector<Pose2>> histories;
  std::vector<PedestrianState> pedestrians;
  /// Pedestrian positions one step earlier.
  std::vector<Vec2> pedestrian_previous;
};

struct ObservedVehicle
{
  int id{-1};
  double length{0.0};
  double width{0.0};
  /// Oldest first; back() is the current pose.
  std::vector<Pose2> history;

  const Pose2 & pose() const { return history.back(); }
  OrientedRect footprint() const { return OrientedRect::at(pose(), length, width); }
};

struct ObservedPedestrian
{
  int id{-1};
  double radius{0.0};
  Vec2 position{Vec2::Zero()};
  Vec2 previous{Vec2::Zero()};
};

struct Observation
{
  double time{0.0};
  /// Sorted spot indices.
  std::vector<int> vacant_spots;
  std::vector<int> occupied_spots;
  /// Sorted by id.
  std::vector<ObservedVehicle> dynamic_vehicles;
  std::vector<ObservedVehicle> static_vehicles;
  std::vector<ObservedPedestrian> pedestrians;
  std::vector<Ray> rays;

  const ObservedVehicle * find_dynamic(int id) const;
};

enum class VehicleClass { Static, Dynamic };

/// Static iff the footprint is contained in some spot.
VehicleClass classify_vehicle(const OrientedRect & vehicle, const ParkingLot & lot);

/// Index of a spot containing the footprint, or -1.
int containing_spot(const OrientedRect & vehicle, const ParkingLot & lot);

/// Rays are spread evenly over a full turn starting at the ego heading.
Observation sense(
  const WorldSnapshot & world, const ParkingLot & lot, const SensingRegion & base_region, int n_ray);

}  // namespace avp
