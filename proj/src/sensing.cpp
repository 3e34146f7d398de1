#include "avp/sensing.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace avp
{

const ObservedVehicle * Observation::find_dynamic(int id) const
{
  auto it = std::lower_bound(
    dynamic_vehicles.begin(), dynamic_vehicles.end(), id,
    [](const ObservedVehicle & v, int key) { return v.id < key; });
  if (it == dynamic_vehicles.end() || it->id != id) {
    return nullptr;
  }
  return &*it;
}

int containing_spot(const OrientedRect & vehicle, const ParkingLot & lot)
{
  for (int i = 0; i < lot.n_spot(); ++i) {
    const OrientedRect & s = lot.spots[i];
    if ((s.center - vehicle.center).norm() > s.bounding_radius()) {
      continue;
    }
    if (obb_contains(s, vehicle)) {
      return i;
    }
  }
  return -1;
}

VehicleClass classify_vehicle(const OrientedRect & vehicle, const ParkingLot & lot)
{
  return containing_spot(vehicle, lot) >= 0 ? VehicleClass::Static : VehicleClass::Dynamic;
}

Observation sense(
  const WorldSnapshot & world, const ParkingLot & lot, const SensingRegion & base_region, int n_ray)
{
  if (n_ray < 1) {
    throw std::invalid_argument("sense: n_ray must be at least 1");
  }
  if (world.vehicles.empty()) {
    throw std::invalid_argument("sense: world has no ego vehicle");
  }
  const Pose2 & ego = world.vehicles[0].pose;
  const Vec2 origin = ego.position();
  const PlacedRegion region = place_region(base_region, ego);

  // Ego is index 0 in the world; it never occludes its own rays.
  const int n_other = static_cast<int>(world.vehicles.size()) - 1;
  std::vector<OrientedRect> others;
  others.reserve(n_other);
  for (int k = 1; k <= n_other; ++k) {
    others.push_back(world.vehicles[k].footprint());
  }

  Observation obs;
  obs.time = world.time;
  obs.rays.reserve(n_ray);
  std::vector<char> vehicle_seen(n_other, 0);
  for (int r = 0; r < n_ray; ++r) {
    const double angle = ego.theta + 2.0 * std::numbers::pi * r / n_ray;
    Ray ray = cast_ray(origin, unit_vector(angle), lot, others, region);
    if (ray.hit_kind == HitKind::Vehicle) {
      vehicle_seen[ray.vehicle] = 1;
      ray.vehicle += 1;  // report world indices
    }
    obs.rays.push_back(ray);
  }

  double reach = 0.0;
  for (const auto & ray : obs.rays) {
    reach = std::max(reach, ray.length());
  }

  // Spot membership and occupancy.
  std::vector<int> spot_of_vehicle(n_other, -1);
  for (int k = 0; k < n_other; ++k) {
    spot_of_vehicle[k] = containing_spot(others[k], lot);
  }
  for (int i = 0; i < lot.n_spot(); ++i) {
    const OrientedRect & spot = lot.spots[i];
    if ((spot.center - origin).norm() > reach + spot.bounding_radius()) {
      continue;
    }
    bool seen = false;
    for (const auto & ray : obs.rays) {
      if (segment_rect_intersects(ray.origin, ray.hit_point, spot)) {
        seen = true;
        break;
      }
    }
    if (!seen) {
      continue;
    }
    const bool occupied =
      std::find(spot_of_vehicle.begin(), spot_of_vehicle.end(), i) != spot_of_vehicle.end();
    (occupied ? obs.occupied_spots : obs.vacant_spots).push_back(i);
  }

  for (int k = 0; k < n_other; ++k) {
    if (!vehicle_seen[k]) {
      continue;
    }
    const int id = k + 1;
    ObservedVehicle v;
    v.id = id;
    v.length = world.vehicles[id].length;
    v.width = world.vehicles[id].width;
    if (id < static_cast<int>(world.histories.size()) && !world.histories[id].empty()) {
      v.history = world.histories[id];
    } else {
      v.history = {world.vehicles[id].pose};
    }
    (spot_of_vehicle[k] >= 0 ? obs.static_vehicles : obs.dynamic_vehicles).push_back(std::move(v));
  }

  for (int m = 0; m < static_cast<int>(world.pedestrians.size()); ++m) {
    const PedestrianState & p = world.pedestrians[m];
    bool seen = false;
    for (const auto & ray : obs.rays) {
      if (segment_disc_intersects(ray.origin, ray.hit_point, p.position, p.radius)) {
        seen = true;
        break;
      }
    }
    if (!seen) {
      continue;
    }
    ObservedPedestrian op;
    op.id = m;
    op.radius = p.radius;
    op.position = p.position;
    op.previous =
      m < static_cast<int>(world.pedestrian_previous.size()) ? world.pedestrian_previous[m] : p.position;
    obs.pedestrians.push_back(op);
  }
  return obs;
}

}  // namespace avp
