#pragma once

#include "avp/geometry.hpp"

#include <span>
#include <vector>

namespace avp
{

struct VehicleState
{
  Pose2 pose;
  double length{4.97};
  double width{1.86};

  OrientedRect footprint() const { return OrientedRect::at(pose, length, width); }
};

/// Signed speed (negative = reverse) and yaw rate.
struct VehicleControl
{
  double v{0.0};
  double omega{0.0};

  bool is_zero() const { return v == 0.0 && omega == 0.0; }
};

struct PedestrianState
{
  Vec2 position{Vec2::Zero()};
  double radius{0.3};
};

struct PedestrianControl
{
  double v{0.0};
  double theta{0.0};
};

struct ControlLimits
{
  double v_max{5.0};
  double omega_max{1.0};

  bool admits(const VehicleControl & u) const
  {
    return std::abs(u.v) <= v_max + 1e-12 && std::abs(u.omega) <= omega_max + 1e-12;
  }
};

/// One forward-Euler step of the discrete-time Reeds-Shepp car.
VehicleState step_vehicle(const VehicleState & state, const VehicleControl & control, double dt);

/// One step of the holonomic pedestrian model.
PedestrianState step_pedestrian(const PedestrianState & state, const PedestrianControl & control, double dt);

/// States visited by applying `controls` in order; the first entry is `state` itself.
std::vector<VehicleState> rollout_vehicle(
  const VehicleState & state, std::span<const VehicleControl> controls, double dt);

}  // namespace avp
