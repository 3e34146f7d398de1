#include "avp/dynamics.hpp"

#include <cmath>
#include <stdexcept>

namespace avp
{

VehicleState step_vehicle(const VehicleState & state, const VehicleControl & control, double dt)
{
  if (!(dt > 0.0)) {
    throw std::invalid_argument("step_vehicle: dt must be positive");
  }
  VehicleState next = state;
  const double theta = state.pose.theta;
  next.pose.x = state.pose.x + control.v * std::cos(theta) * dt;
  next.pose.y = state.pose.y + control.v * std::sin(theta) * dt;
  next.pose.theta = normalize_angle(theta + control.omega * dt);
  return next;
}

PedestrianState step_pedestrian(const PedestrianState & state, const PedestrianControl & control, double dt)
{
  if (!(dt > 0.0)) {
    throw std::invalid_argument("step_pedestrian: dt must be positive");
  }
  PedestrianState next = state;
  next.position.x() = state.position.x() + control.v * std::cos(control.theta) * dt;
  next.position.y() = state.position.y() + control.v * std::sin(control.theta) * dt;
  return next;
}

std::vector<VehicleState> rollout_vehicle(
  const VehicleState & state, std::span<const VehicleControl> controls, double dt)
{
  std::vector<VehicleState> out;
  out.reserve(controls.size() + 1);
  out.push_back(state);
  for (const auto & u : controls) {
    out.push_back(step_vehicle(out.back(), u, dt));
  }
  return out;
}

}  // namespace avp
