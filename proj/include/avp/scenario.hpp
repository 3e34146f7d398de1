#pragma once

#include "avp/dynamics.hpp"
#include "avp/geometry.hpp"
#include "avp/lot_io.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

namespace avp
{

/// Four columns of ten spots between three vertical roads, closed by two horizontal roads.
/// Spot index = column * 10 + row; row 0 is the bottom row. Columns 1 and 2 face the middle road.
struct StandardLot
{
  static constexpr int kColumns = 4;
  static constexpr int kRows = 10;

  ParkingLot lot;
  double spot_length{5.5};
  double spot_width{2.7};
  double road_width{6.5};
  /// x of the three vertical center lines, y of the two horizontal ones.
  std::array<double, 3> vertical_x{};
  std::array<double, 2> horizontal_y{};
  Pose2 ego_start;

  static int spot_index(int column, int row) { return column * kRows + row; }
  /// Bottom five rows of the two middle columns.
  std::vector<int> bottom_spots() const;
  /// Center x of the middle road, which serves every middle-column spot.
  double middle_road_x() const { return vertical_x[1]; }
};

StandardLot make_standard_lot(const LotDefaults & sizes = {});

/// Deterministic random helpers on a 64-bit Mersenne Twister; the standard distributions are
/// implementation-defined, so these are spelled out to keep scenarios identical across toolchains.
class Rng
{
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  /// Uniform in [0, 1).
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [lo, hi].
  int integer(int lo, int hi);
  template <typename T>
  void shuffle(std::vector<T> & v)
  {
    for (int i = static_cast<int>(v.size()) - 1; i > 0; --i) {
      std::swap(v[i], v[integer(0, i)]);
    }
  }

private:
  std::mt19937_64 engine_;
};

/// Maneuver id in 1..8 = 1 + far_lane + 2 * after + 4 * tail_in.
struct Maneuver
{
  bool far_lane{false};
  bool after{false};
  bool tail_in{false};

  static Maneuver from_id(int id);
  int id() const { return 1 + (far_lane ? 1 : 0) + (after ? 2 : 0) + (tail_in ? 4 : 0); }
};

struct ManeuverParams
{
  double turn_radius{2.0};
  double approach_speed{2.0};
  double reverse_speed{1.0};
  double arc_speed{1.5};
  double vehicle_length{4.97};
  double vehicle_width{1.86};
};

/// Lane along which a middle-column spot is approached. Traffic comes from the entrance, so both
/// lanes of the middle road run south; near/far is the lateral position relative to the spot.
struct ApproachLane
{
  Vec2 abeam{Vec2::Zero()};
  Vec2 direction{Vec2::UnitY()};
};

ApproachLane approach_lane(const StandardLot & lot, int spot, bool far_lane);

/// Spawn on `lane`, `distance` meters before (upstream of) or after the abeam point, facing along the lane.
VehicleState maneuver_spawn(const ApproachLane & lane, bool after, double distance, const ManeuverParams & params);

/// Controls driving `spawn` into `spot`: a straight approach along the lane (forward or reverse),
/// a pull-forward S-curve shifting away from the spot when the lane is too close to align in
/// time, a 90 degree arc, and a straight leg ending at the spot center. The arcs are simulated in the discrete model and the two straight legs solved against
/// them, so the rollout lands on the center up to rounding. Throws std::invalid_argument if the
/// spawn is not on an aisle perpendicular to the spot or the aisle is too narrow for the final leg.
std::vector<VehicleControl> maneuver_plan(
  const Maneuver & maneuver, const VehicleState & spawn, const OrientedRect & spot, const ManeuverParams & params,
  double dt);

struct ScenarioConfig
{
  std::uint64_t seed{0};
  /// 1 or 2; 0 draws one of them per scenario.
  int n_dynamic{0};
  bool reactive{true};
  int passiveness_min{2};
  int passiveness_max{6};
  double t_f{100.0};
  double t_hist{4.0};
  double dt{0.1};
  int n_pedestrians{0};
  double spawn_min{6.0};
  double spawn_max{14.0};
  int max_redraws{100};
  ManeuverParams maneuver;
  LotDefaults sizes;
};

struct ScriptedAgent
{
  enum class Kind { Vehicle, Pedestrian };

  int id{-1};
  Kind kind{Kind::Vehicle};
  int passiveness{0};
  /// Vehicles.
  VehicleState vehicle;
  int target_spot{-1};
  int maneuver{0};
  /// Pedestrians; `pedestrian_controls` plays the role of `controls`.
  PedestrianState pedestrian;
  Vec2 pedestrian_previous{Vec2::Zero()};
  std::vector<PedestrianControl> pedestrian_controls;
  /// Poses over [-t_hist, 0], oldest first; back() is the state at t = 0.
  std::vector<Pose2> history;
  /// Predefined controls from t = 0, padded with zeros to cover the episode and lookahead.
  std::vector<VehicleControl> controls;
  /// Length of the scripted part of `controls`; the rest is padding.
  int plan_length{0};
  int cursor{0};
  int braked_steps{0};
};

struct Scenario
{
  StandardLot layout;
  std::vector<int> vacant_spots;
  /// Parked cars, one per occupied spot.
  std::vector<VehicleState> static_vehicles;
  std::vector<ScriptedAgent> agents;
  VehicleState ego;
  int redraws{0};
  /// Seed the scenario was actually generated from.
  std::uint64_t seed{0};
};

/// Throws std::runtime_error if no collision-free assignment is found within max_redraws.
Scenario generate_scenario(const ScenarioConfig & config);

/// generate_scenario, re-seeding deterministically from config.seed when the re-draw bound is
/// hit (some vacancy draws admit no collision-free pair of maneuvers). `attempts` reports how many
/// seeds were tried.
Scenario generate_scenario_reseeding(const ScenarioConfig & config, int max_attempts = 32, int * attempts = nullptr);

/// One reactive control: zero (and the cursor held) if any of the next `passiveness` poses of
/// the remaining plan touches the ego's current footprint, else the next unused control.
VehicleControl reactive_step(ScriptedAgent & agent, const VehicleState & ego_now, double dt, bool * braked = nullptr);

PedestrianControl reactive_pedestrian_step(
  ScriptedAgent & agent, const VehicleState & ego_now, double dt, bool * braked = nullptr);

}  // namespace avp
