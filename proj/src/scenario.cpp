#include "avp/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace avp
{

std::vector<int> StandardLot::bottom_spots() const
{
  std::vector<int> out;
  for (int column : {1, 2}) {
    for (int row = 0; row < 5; ++row) {
      out.push_back(spot_index(column, row));
    }
  }
  return out;
}

StandardLot make_standard_lot(const LotDefaults & sizes)
{
  StandardLot s;
  s.spot_length = sizes.spot_length;
  s.spot_width = sizes.spot_width;
  s.road_width = sizes.road_width;
  const double L = sizes.spot_length;
  const double W = sizes.spot_width;
  const double R = sizes.road_width;

  // Road | 2 columns | road | 2 columns | road, with a horizontal road above and below the rows.
  const double width = 3.0 * R + 4.0 * L;
  const double height = 2.0 * R + StandardLot::kRows * W;
  s.lot.boundary = {Vec2(0.0, 0.0), Vec2(width, height)};
  s.vertical_x = {R / 2.0, R + 2.0 * L + R / 2.0, width - R / 2.0};
  s.horizontal_y = {R / 2.0, height - R / 2.0};

  const std::array<double, StandardLot::kColumns> column_x = {
    R + L / 2.0, R + 1.5 * L, 2.0 * R + 2.5 * L, 2.0 * R + 3.5 * L};
  const std::array<double, StandardLot::kColumns> column_heading = {0.0, std::numbers::pi, 0.0, std::numbers::pi};
  for (int c = 0; c < StandardLot::kColumns; ++c) {
    for (int r = 0; r < StandardLot::kRows; ++r) {
      OrientedRect spot;
      spot.center = Vec2(column_x[c], R + W * (r + 0.5));
      spot.heading = normalize_angle(column_heading[c]);
      spot.length = L;
      spot.width = W;
      s.lot.spots.push_back(spot);
    }
  }
  for (double x : s.vertical_x) {
    s.lot.roads.push_back({Vec2(x, s.horizontal_y[0]), Vec2(x, s.horizontal_y[1]), R});
  }
  for (double y : s.horizontal_y) {
    s.lot.roads.push_back({Vec2(s.vertical_x[0], y), Vec2(s.vertical_x[2], y), R});
  }
  s.lot.entrance = Vec2(s.middle_road_x(), height);
  s.ego_start = Pose2{s.middle_road_x(), height - 4.0, -std::numbers::pi / 2.0};
  s.lot.validate();
  return s;
}

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

int Rng::integer(int lo, int hi)
{
  if (hi < lo) {
    throw std::invalid_argument("Rng::integer: empty range");
  }
  const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
  return lo + static_cast<int>(engine_() % span);
}

Maneuver Maneuver::from_id(int id)
{
  if (id < 1 || id > 8) {
    throw std::invalid_argument("maneuver id must be in 1..8");
  }
  const int k = id - 1;
  return {(k & 1) != 0, (k & 2) != 0, (k & 4) != 0};
}

ApproachLane approach_lane(const StandardLot & lot, int spot, bool far_lane)
{
  const int column = spot / StandardLot::kRows;
  if (spot < 0 || spot >= lot.lot.n_spot() || (column != 1 && column != 2)) {
    throw std::invalid_argument("approach_lane: spot does not face the middle road");
  }
  const double x0 = lot.middle_road_x();
  const double quarter = lot.road_width / 4.0;
  const bool west = (column == 1) != far_lane;
  ApproachLane lane;
  lane.abeam = Vec2(west ? x0 - quarter : x0 + quarter, lot.lot.spots[spot].center.y());
  lane.direction = Vec2(0.0, -1.0);
  return lane;
}

VehicleState maneuver_spawn(const ApproachLane & lane, bool after, double distance, const ManeuverParams & params)
{
  VehicleState s;
  const Vec2 p = lane.abeam + (after ? distance : -distance) * lane.direction;
  s.pose = Pose2{p.x(), p.y(), std::atan2(lane.direction.y(), lane.direction.x())};
  s.length = params.vehicle_length;
  s.width = params.vehicle_width;
  return s;
}

namespace
{

void append_straight(std::vector<VehicleControl> & out, double distance, double speed, double dt)
{
  if (distance <= 1e-12) {
    return;
  }
  // Signed speed, unsigned distance.
  const double step = std::abs(speed) * dt;
  const auto full = static_cast<int>(std::floor(distance / step + 1e-9));
  for (int i = 0; i < full; ++i) {
    out.push_back({speed, 0.0});
  }
  const double rest = distance - full * step;
  if (rest > 1e-9) {
    out.push_back({std::copysign(rest / dt, speed), 0.0});
  }
}

// Arc turning the heading by `angle` (signed, world frame) at signed speed `v`, radius >= `radius`.
void append_arc(std::vector<VehicleControl> & out, double angle, double v, double radius, double dt)
{
  const double length = std::abs(angle) * radius;
  const auto n = std::max(1, static_cast<int>(std::ceil(length / (std::abs(v) * dt) - 1e-9)));
  const double omega = angle / (n * dt);
  for (int i = 0; i < n; ++i) {
    out.push_back({v, omega});
  }
}

}  // namespace

std::vector<VehicleControl> maneuver_plan(
  const Maneuver & maneuver, const VehicleState & spawn, const OrientedRect & spot, const ManeuverParams & params,
  double dt)
{
  if (!(dt > 0.0) || !(params.turn_radius > 0.0) || !(params.approach_speed > 0.0) ||
      !(params.reverse_speed > 0.0) || !(params.arc_speed > 0.0)) {
    throw std::invalid_argument("maneuver_plan: speeds, radius and dt must be positive");
  }
  const Vec2 into = unit_vector(spot.heading);
  const Vec2 along = unit_vector(spawn.pose.theta);
  if (std::abs(into.dot(along)) > 1e-6) {
    throw std::invalid_argument("maneuver_plan: spawn heading is not along the spot's aisle");
  }
  const Vec2 edge = spot.center - 0.5 * spot.length * into;
  const double lane_offset = (edge - spawn.pose.position()).dot(into);
  if (!(lane_offset > 0.5 * spawn.width)) {
    throw std::invalid_argument("maneuver_plan: spawn is not on the aisle in front of the spot");
  }
  // +1 if turning from `along` toward `into` is counter-clockwise.
  const double sense = (along.x() * into.y() - along.y() * into.x()) > 0.0 ? 1.0 : -1.0;
  const double half_pi = std::numbers::pi / 2.0;
  const double R = params.turn_radius;

  // Arc legs, simulated from the origin to get their displacement. The vehicle should come out of
  // the 90 degree arc aligned with the spot axis just as its leading end reaches the spot edge:
  // later scrapes the neighbours, earlier swings the trailing end into the opposite row. An
  // S-curve first moves it to that lateral offset.
  std::vector<VehicleControl> arcs;
  const double shift = 0.5 * spawn.length + R - lane_offset;
  if (std::abs(shift) > 1e-6) {
    if (std::abs(shift) > 2.0 * R) {
      throw std::invalid_argument("maneuver_plan: lane shift exceeds the turning geometry");
    }
    const double alpha = std::copysign(std::acos(1.0 - std::abs(shift) / (2.0 * R)), shift);
    append_arc(arcs, -sense * alpha, params.arc_speed, R, dt);
    append_arc(arcs, sense * alpha, params.arc_speed, R, dt);
  }
  if (!maneuver.tail_in) {
    append_arc(arcs, sense * half_pi, params.arc_speed, R, dt);
  } else {
    append_arc(arcs, -sense * half_pi, -params.reverse_speed, R, dt);
  }
  VehicleState probe = spawn;
  probe.pose.x = 0.0;
  probe.pose.y = 0.0;
  for (const auto & u : arcs) {
    probe = step_vehicle(probe, u, dt);
  }
  const Vec2 arc_shift = probe.pose.position();

  // Straight legs: approach along the lane to the arc start, then along the spot axis to its center.
  const double w_spawn = (spawn.pose.position() - edge).dot(along);
  const double w_goal = (spot.center - edge).dot(along);
  const double approach = (w_goal - arc_shift.dot(along)) - w_spawn;
  const double final_leg = 0.5 * spot.length + lane_offset - arc_shift.dot(into);
  if (final_leg < 0.0) {
    throw std::invalid_argument("maneuver_plan: aisle too narrow for this maneuver");
  }

  std::vector<VehicleControl> out;
  if (approach >= 0.0) {
    append_straight(out, approach, params.approach_speed, dt);
  } else {
    append_straight(out, -approach, -params.reverse_speed, dt);
  }
  out.insert(out.end(), arcs.begin(), arcs.end());
  if (!maneuver.tail_in) {
    append_straight(out, final_leg, params.approach_speed / 2.0, dt);
  } else {
    append_straight(out, final_leg, -params.reverse_speed, dt);
  }
  const auto states = rollout_vehicle(spawn, out, dt);
  if (!obb_contains(spot, states.back().footprint())) {
    throw std::invalid_argument("maneuver_plan: rollout does not end inside the spot");
  }
  return out;
}

namespace
{

struct Timeline
{
  // Footprints from t = -t_hist (index 0) onward; index `origin` is t = 0.
  std::vector<OrientedRect> footprints;
  int origin{0};
};

OrientedRect at_time(const Timeline & tl, int k)
{
  const int i = std::clamp(tl.origin + k, 0, static_cast<int>(tl.footprints.size()) - 1);
  return tl.footprints[i];
}

bool timelines_collide(const Timeline & a, const Timeline & b)
{
  const int lo = -std::min(a.origin, b.origin);
  const int hi = std::max(
    static_cast<int>(a.footprints.size()) - a.origin, static_cast<int>(b.footprints.size()) - b.origin);
  for (int k = lo; k < hi; ++k) {
    if (obb_intersects(at_time(a, k), at_time(b, k))) {
      return true;
    }
  }
  return false;
}

std::optional<std::pair<ScriptedAgent, Timeline>> draw_vehicle(
  Rng & rng, const Scenario & sc, const std::vector<int> & free_targets, const ScenarioConfig & cfg)
{
  const int target = free_targets[rng.integer(0, static_cast<int>(free_targets.size()) - 1)];
  const Maneuver m = Maneuver::from_id(rng.integer(1, 8));
  const double distance = rng.uniform(cfg.spawn_min, cfg.spawn_max);

  const ApproachLane lane = approach_lane(sc.layout, target, m.far_lane);
  const VehicleState spawn = maneuver_spawn(lane, m.after, distance, cfg.maneuver);
  std::vector<VehicleControl> plan;
  try {
    plan = maneuver_plan(m, spawn, sc.layout.lot.spots[target], cfg.maneuver, cfg.dt);
  } catch (const std::invalid_argument &) {
    return std::nullopt;
  }

  ScriptedAgent agent;
  agent.kind = ScriptedAgent::Kind::Vehicle;
  agent.target_spot = target;
  agent.maneuver = m.id();
  agent.vehicle = spawn;
  const int n_hist = static_cast<int>(std::lround(cfg.t_hist / cfg.dt));
  const Vec2 dir = unit_vector(spawn.pose.theta);
  for (int k = n_hist; k >= 0; --k) {
    const Vec2 p = spawn.pose.position() - k * cfg.maneuver.approach_speed * cfg.dt * dir;
    agent.history.push_back(Pose2{p.x(), p.y(), spawn.pose.theta});
  }
  agent.plan_length = static_cast<int>(plan.size());
  agent.controls = std::move(plan);

  Timeline tl;
  tl.origin = n_hist;
  for (std::size_t i = 0; i + 1 < agent.history.size(); ++i) {
    tl.footprints.push_back(OrientedRect::at(agent.history[i], spawn.length, spawn.width));
  }
  for (const auto & s : rollout_vehicle(spawn, agent.controls, cfg.dt)) {
    tl.footprints.push_back(s.footprint());
  }

  const auto & lot = sc.layout.lot;
  for (const auto & fp : tl.footprints) {
    if (!lot.boundary.contains(fp)) {
      return std::nullopt;
    }
    for (const auto & parked : sc.static_vehicles) {
      if (obb_intersects(fp, parked.footprint())) {
        return std::nullopt;
      }
    }
  }
  for (int k = 0; k <= n_hist; ++k) {
    if (obb_intersects(tl.footprints[k], sc.ego.footprint())) {
      return std::nullopt;
    }
  }
  return std::make_pair(std::move(agent), std::move(tl));
}

// Walks from a random point on one road center line to a random point on another.
ScriptedAgent draw_pedestrian(Rng & rng, const Scenario & sc, const ScenarioConfig & cfg)
{
  const auto & roads = sc.layout.lot.roads;
  auto point_on = [&](const Road & r) { return r.start + rng.uniform() * (r.end - r.start); };
  const Vec2 a = point_on(roads[rng.integer(0, static_cast<int>(roads.size()) - 1)]);
  const Vec2 b = point_on(roads[rng.integer(0, static_cast<int>(roads.size()) - 1)]);
  const double speed = rng.uniform(0.8, 1.4);

  ScriptedAgent p;
  p.kind = ScriptedAgent::Kind::Pedestrian;
  p.pedestrian.position = a;
  p.pedestrian_previous = a;
  const double heading = std::atan2(b.y() - a.y(), b.x() - a.x());
  const double dist = (b - a).norm();
  const auto n = static_cast<int>(std::floor(dist / (speed * cfg.dt)));
  for (int i = 0; i < n; ++i) {
    p.pedestrian_controls.push_back({speed, heading});
  }
  p.plan_length = n;
  const int n_hist = static_cast<int>(std::lround(cfg.t_hist / cfg.dt));
  for (int k = 0; k <= n_hist; ++k) {
    p.history.push_back(Pose2{a.x(), a.y(), heading});
  }
  return p;
}

}  // namespace

Scenario generate_scenario(const ScenarioConfig & cfg)
{
  if (!(cfg.t_f > 0.0) || !(cfg.dt > 0.0) || cfg.passiveness_min < 0 || cfg.passiveness_max < cfg.passiveness_min) {
    throw std::invalid_argument("generate_scenario: invalid config");
  }
  if (cfg.n_dynamic < 0 || cfg.n_dynamic > 2) {
    throw std::invalid_argument("generate_scenario: n_dynamic must be 0 (random), 1 or 2");
  }
  Rng rng(cfg.seed);
  Scenario sc;
  sc.seed = cfg.seed;
  sc.layout = make_standard_lot(cfg.sizes);
  const auto & lot = sc.layout.lot;

  const int n_dynamic = cfg.n_dynamic == 0 ? rng.integer(1, 2) : cfg.n_dynamic;
  std::vector<int> bottom = sc.layout.bottom_spots();
  rng.shuffle(bottom);
  const int n_vacant = rng.integer(n_dynamic, static_cast<int>(bottom.size()));
  std::vector<int> targets(bottom.begin(), bottom.begin() + n_vacant);
  std::sort(targets.begin(), targets.end());

  sc.vacant_spots = targets;
  sc.vacant_spots.push_back(StandardLot::spot_index(0, rng.integer(0, StandardLot::kRows - 1)));
  sc.vacant_spots.push_back(StandardLot::spot_index(3, rng.integer(0, StandardLot::kRows - 1)));
  std::sort(sc.vacant_spots.begin(), sc.vacant_spots.end());

  for (int i = 0; i < lot.n_spot(); ++i) {
    if (std::binary_search(sc.vacant_spots.begin(), sc.vacant_spots.end(), i)) {
      continue;
    }
    VehicleState parked;
    parked.pose = lot.spots[i].pose();
    if (rng.uniform() < 0.5) {
      parked.pose.theta = normalize_angle(parked.pose.theta + std::numbers::pi);
    }
    parked.length = cfg.maneuver.vehicle_length;
    parked.width = cfg.maneuver.vehicle_width;
    sc.static_vehicles.push_back(parked);
  }

  sc.ego.pose = sc.layout.ego_start;
  sc.ego.length = cfg.maneuver.vehicle_length;
  sc.ego.width = cfg.maneuver.vehicle_width;

  const int total_steps = static_cast<int>(std::ceil(cfg.t_f / cfg.dt - 1e-9));
  std::vector<Timeline> accepted;
  while (static_cast<int>(sc.agents.size()) < n_dynamic) {
    std::vector<int> free;
    for (int t : targets) {
      const bool taken = std::any_of(
        sc.agents.begin(), sc.agents.end(), [t](const ScriptedAgent & a) { return a.target_spot == t; });
      if (!taken) {
        free.push_back(t);
      }
    }
    auto drawn = draw_vehicle(rng, sc, free, cfg);
    bool ok = drawn.has_value();
    if (ok) {
      for (const auto & other : accepted) {
        if (timelines_collide(drawn->second, other)) {
          ok = false;
          break;
        }
      }
    }
    if (!ok) {
      if (++sc.redraws > cfg.max_redraws) {
        throw std::runtime_error("generate_scenario: re-draw bound exceeded");
      }
      // A fixed first vehicle can leave no room for the second, so start the set over.
      sc.agents.clear();
      accepted.clear();
      continue;
    }
    drawn->first.id = static_cast<int>(sc.agents.size()) + 1;
    sc.agents.push_back(std::move(drawn->first));
    accepted.push_back(std::move(drawn->second));
  }
  for (int m = 0; m < cfg.n_pedestrians; ++m) {
    auto p = draw_pedestrian(rng, sc, cfg);
    p.id = m;
    sc.agents.push_back(std::move(p));
  }

  for (auto & a : sc.agents) {
    a.passiveness = cfg.reactive ? rng.integer(cfg.passiveness_min, cfg.passiveness_max) : 0;
    const auto needed = static_cast<std::size_t>(total_steps + a.passiveness + 1);
    if (a.kind == ScriptedAgent::Kind::Vehicle) {
      a.controls.resize(std::max(a.controls.size(), needed));
    } else {
      a.pedestrian_controls.resize(std::max(a.pedestrian_controls.size(), needed));
    }
  }
  return sc;
}

Scenario generate_scenario_reseeding(const ScenarioConfig & config, int max_attempts, int * attempts)
{
  ScenarioConfig cfg = config;
  for (int k = 0; k < max_attempts; ++k) {
    // Attempt 0 uses the seed itself; later ones a splitmix64 step away from it.
    std::uint64_t z = config.seed + static_cast<std::uint64_t>(k) * 0x9E3779B97F4A7C15ull;
    if (k > 0) {
      z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
      z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
      z ^= z >> 31;
    }
    cfg.seed = z;
    try {
      Scenario sc = generate_scenario(cfg);
      if (attempts) {
        *attempts = k + 1;
      }
      return sc;
    } catch (const std::runtime_error &) {
    }
  }
  throw std::runtime_error("generate_scenario_reseeding: no feasible scenario");
}

VehicleControl reactive_step(ScriptedAgent & agent, const VehicleState & ego_now, double dt, bool * braked)
{
  if (braked) {
    *braked = false;
  }
  if (agent.cursor >= agent.plan_length) {
    return {};
  }
  const OrientedRect ego_fp = ego_now.footprint();
  VehicleState s = agent.vehicle;
  for (int k = 0; k < agent.passiveness; ++k) {
    const auto i = static_cast<std::size_t>(agent.cursor + k);
    const VehicleControl u = i < agent.controls.size() ? agent.controls[i] : VehicleControl{};
    s = step_vehicle(s, u, dt);
    if (obb_intersects(s.footprint(), ego_fp)) {
      ++agent.braked_steps;
      if (braked) {
        *braked = true;
      }
      return {};
    }
  }
  return agent.controls[agent.cursor++];
}

PedestrianControl reactive_pedestrian_step(
  ScriptedAgent & agent, const VehicleState & ego_now, double dt, bool * braked)
{
  if (braked) {
    *braked = false;
  }
  if (agent.cursor >= agent.plan_length) {
    return {};
  }
  const OrientedRect ego_fp = ego_now.footprint();
  PedestrianState s = agent.pedestrian;
  for (int k = 0; k < agent.passiveness; ++k) {
    const auto i = static_cast<std::size_t>(agent.cursor + k);
    const PedestrianControl u = i < agent.pedestrian_controls.size() ? agent.pedestrian_controls[i] : PedestrianControl{};
    s = step_pedestrian(s, u, dt);
    if (disc_rect_intersects(s.position, s.radius, ego_fp)) {
      ++agent.braked_steps;
      if (braked) {
        *braked = true;
      }
      return {};
    }
  }
  return agent.pedestrian_controls[agent.cursor++];
}

}  // namespace avp
