#include "avp/planner.hpp"

#include "avp/reeds_shepp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <queue>
#include <stdexcept>
#include <string>
#include <unordered_map>

namespace avp
{

namespace
{

constexpr double kInf = std::numeric_limits<double>::infinity();

// Obstacle-aware 8-connected grid distance to the goal, for the vehicle center. A cell is
// blocked when a disc of half the vehicle width (less the cell half-diagonal) around its center
// touches an inflated obstacle or leaves the lot.
class HeuristicGrid
{
public:
  HeuristicGrid(const PlanningScene & scene, const Vec2 & goal, double half_width, double inflation, double res)
  : origin_(scene.lot->boundary.min), res_(res)
  {
    const Vec2 extent = scene.lot->boundary.extent();
    nx_ = std::max(1, static_cast<int>(std::ceil(extent.x() / res)));
    ny_ = std::max(1, static_cast<int>(std::ceil(extent.y() / res)));
    const double slack = 0.5 * std::sqrt(2.0) * res;
    const double clearance = std::max(0.0, half_width - slack);
    blocked_.assign(static_cast<std::size_t>(nx_) * ny_, 0);
    const AxisBox & box = scene.lot->boundary;
    for (int iy = 0; iy < ny_; ++iy) {
      for (int ix = 0; ix < nx_; ++ix) {
        const Vec2 c = center(ix, iy);
        if (
          c.x() - box.min.x() < clearance || box.max.x() - c.x() < clearance || c.y() - box.min.y() < clearance ||
          box.max.y() - c.y() < clearance) {
          blocked_[index(ix, iy)] = 1;
        }
      }
    }
    const double radius = std::max(0.0, half_width + inflation - slack);
    for (const auto & ob : scene.obstacles) {
      const double reach = ob.bounding_radius() + radius;
      const int x0 = std::max(0, static_cast<int>(std::floor((ob.center.x() - reach - origin_.x()) / res)));
      const int x1 = std::min(nx_ - 1, static_cast<int>(std::floor((ob.center.x() + reach - origin_.x()) / res)));
      const int y0 = std::max(0, static_cast<int>(std::floor((ob.center.y() - reach - origin_.y()) / res)));
      const int y1 = std::min(ny_ - 1, static_cast<int>(std::floor((ob.center.y() + reach - origin_.y()) / res)));
      for (int iy = y0; iy <= y1; ++iy) {
        for (int ix = x0; ix <= x1; ++ix) {
          if (!blocked_[index(ix, iy)] && disc_rect_intersects(center(ix, iy), radius, ob)) {
            blocked_[index(ix, iy)] = 1;
          }
        }
      }
    }

    dist_.assign(blocked_.size(), kInf);
    const auto g = cell(goal);
    if (!g || blocked_[index(g->first, g->second)]) {
      return;
    }
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> open;
    dist_[index(g->first, g->second)] = 0.0;
    open.push({0.0, index(g->first, g->second)});
    const double diag = std::sqrt(2.0) * res;
    while (!open.empty()) {
      const auto [d, idx] = open.top();
      open.pop();
      if (d > dist_[idx]) {
        continue;
      }
      const int ix = idx % nx_;
      const int iy = idx / nx_;
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          if (dx == 0 && dy == 0) {
            continue;
          }
          const int jx = ix + dx;
          const int jy = iy + dy;
          if (jx < 0 || jy < 0 || jx >= nx_ || jy >= ny_) {
            continue;
          }
          const int j = index(jx, jy);
          if (blocked_[j]) {
            continue;
          }
          const double nd = d + (dx != 0 && dy != 0 ? diag : res);
          if (nd < dist_[j]) {
            dist_[j] = nd;
            open.push({nd, j});
          }
        }
      }
    }
  }

  /// Lower bound on the remaining travel; infinite when unreachable. The cell half-diagonal is
  /// subtracted so the bound holds for any point in the cell.
  double lookup(const Vec2 & p) const
  {
    const auto c = cell(p);
    if (!c) {
      return kInf;
    }
    const double d = dist_[index(c->first, c->second)];
    return std::isinf(d) ? d : std::max(0.0, d - std::sqrt(2.0) * res_);
  }

private:
  int index(int ix, int iy) const { return iy * nx_ + ix; }
  Vec2 center(int ix, int iy) const { return origin_ + Vec2{(ix + 0.5) * res_, (iy + 0.5) * res_}; }
  std::optional<std::pair<int, int>> cell(const Vec2 & p) const
  {
    const int ix = static_cast<int>(std::floor((p.x() - origin_.x()) / res_));
    const int iy = static_cast<int>(std::floor((p.y() - origin_.y()) / res_));
    if (ix < 0 || iy < 0 || ix >= nx_ || iy >= ny_) {
      return std::nullopt;
    }
    return std::make_pair(ix, iy);
  }

  Vec2 origin_;
  double res_;
  int nx_{0};
  int ny_{0};
  std::vector<char> blocked_;
  std::vector<double> dist_;
};

struct Goal
{
  int spot{-1};
  const OrientedRect * spot_rect{nullptr};
  Pose2 pose;
  /// Poses the analytic expansion aims for.
  std::vector<Pose2> targets;
  double xy_tol{0.0};
  double heading_tol{0.0};

  bool satisfied(const VehicleState & s) const
  {
    if (spot_rect != nullptr) {
      return obb_contains(*spot_rect, s.footprint());
    }
    return (s.pose.position() - pose.position()).norm() <= xy_tol &&
           std::abs(normalize_angle(s.pose.theta - pose.theta)) <= heading_tol;
  }
};

// Steps needed to cover `distance` at `speed`, the last one possibly partial.
void append_segment(
  std::vector<VehicleControl> & out, double distance, double speed, double curvature, double dt)
{
  const double duration = std::abs(distance) / speed;
  const int full = static_cast<int>(std::floor(duration / dt + 1e-9));
  const double v = distance < 0.0 ? -speed : speed;
  for (int i = 0; i < full; ++i) {
    out.push_back({v, v * curvature});
  }
  const double rest = duration - full * dt;
  if (rest > 1e-9) {
    const double vp = v * rest / dt;
    out.push_back({vp, vp * curvature});
  }
}

std::vector<VehicleControl> controls_for_path(const RsPath & path, const PlannerConfig & cfg)
{
  std::vector<VehicleControl> out;
  for (const auto & seg : path.segments) {
    const double distance = seg.length * path.radius;
    const double speed = distance >= 0.0 ? cfg.forward_speed : cfg.reverse_speed;
    double curvature = 0.0;
    if (seg.type == RsSegment::Type::Left) {
      curvature = 1.0 / path.radius;
    } else if (seg.type == RsSegment::Type::Right) {
      curvature = -1.0 / path.radius;
    }
    append_segment(out, distance, speed, curvature, cfg.dt);
  }
  return out;
}

struct Node
{
  VehicleState state;
  double g{0.0};
  double time{0.0};
  int parent{-1};
  int direction{0};
  VehicleControl control;
  int n_steps{0};
};

class HybridAStar
{
public:
  HybridAStar(const PlanningScene & scene, const Goal & goal, const PlannerConfig & cfg, double cost_bound)
  : scene_(scene), goal_(goal), cfg_(cfg), bound_(cost_bound)
  {
  }

  std::optional<MotionPlan> run(const VehicleState & start, SearchStats * stats)
  {
    if (goal_.satisfied(start)) {
      MotionPlan plan;
      plan.states = {start};
      return finish(std::move(plan));
    }
    grid_.emplace(scene_, goal_.pose.position(), 0.5 * start.width, cfg_.inflation, cfg_.heuristic_resolution);
    const double h0 = heuristic(start.pose);
    if (std::isinf(h0) || h0 >= bound_) {
      return std::nullopt;
    }

    nodes_.push_back({start, 0.0, 0.0, -1, 0, {}, 0});
    push(0, cfg_.heuristic_weight * h0);
    best_g_[key(start.pose)] = 0.0;
    int expansions = 0;
    while (!open_.empty()) {
      const Entry top = open_.top();
      open_.pop();
      const int idx = top.node;
      const Node node = nodes_[idx];
      const auto k = key(node.state.pose);
      if (closed_.count(k) != 0) {
        continue;
      }
      closed_.emplace(k, idx);
      if (node.g >= bound_) {
        continue;
      }
      if (idx != 0 && goal_.satisfied(node.state)) {
        if (stats) {
          stats->expansions = expansions;
        }
        return finish(reconstruct(idx, {}));
      }
      if (++expansions > cfg_.node_budget) {
        if (stats) {
          stats->budget_exhausted = true;
        }
        break;
      }
      const double to_goal = (node.state.pose.position() - goal_.pose.position()).norm();
      const bool near = to_goal <= cfg_.analytic_radius && expansions % cfg_.analytic_near_interval == 0;
      if (expansions % cfg_.analytic_interval == 1 || near) {
        if (auto shot = analytic(node)) {
          if (stats) {
            stats->expansions = expansions;
          }
          return finish(reconstruct(idx, *shot));
        }
      }
      expand(idx);
    }
    if (stats) {
      stats->expansions = expansions;
    }
    return std::nullopt;
  }

private:
  struct Entry
  {
    double f;
    std::uint64_t seq;
    int node;
    bool operator>(const Entry & o) const { return f != o.f ? f > o.f : seq > o.seq; }
  };

  std::int64_t key(const Pose2 & p) const
  {
    const auto ix = static_cast<std::int64_t>(std::floor(p.x / cfg_.xy_resolution));
    const auto iy = static_cast<std::int64_t>(std::floor(p.y / cfg_.xy_resolution));
    const double turn = (p.theta + std::numbers::pi) / (2.0 * std::numbers::pi);
    const auto it = static_cast<std::int64_t>(std::floor(turn * cfg_.heading_bins)) % cfg_.heading_bins;
    return ((ix + (1 << 20)) << 40) | ((iy + (1 << 20)) << 16) | it;
  }

  void push(int idx, double f) { open_.push({f, seq_++, idx}); }

  double heuristic(const Pose2 & p) const
  {
    const double grid = grid_->lookup(p.position());
    if (std::isinf(grid)) {
      return grid;
    }
    double rs = kInf;
    for (const auto & t : goal_.targets) {
      rs = std::min(rs, reeds_shepp_distance(p, t, cfg_.min_turning_radius));
    }
    if (goal_.spot_rect != nullptr) {
      // Any pose inside the spot is a goal, so the distance to its center is not a lower bound.
      rs = std::max(0.0, rs - 0.5 * goal_.spot_rect->length);
    }
    return std::max(grid, rs);
  }

  bool free(const VehicleState & s) const { return scene_.footprint_free(s.footprint(), cfg_.inflation); }

  void expand(int idx)
  {
    const double kmax = 1.0 / cfg_.min_turning_radius;
    for (int dir : {1, -1}) {
      const double speed = dir > 0 ? cfg_.forward_speed : cfg_.reverse_speed;
      const int n = dir > 0 ? cfg_.forward_steps : cfg_.reverse_steps;
      const double v = dir * speed;
      for (int s = 0; s < cfg_.steering_samples; ++s) {
        const double kappa =
          cfg_.steering_samples == 1 ? 0.0 : -kmax + 2.0 * kmax * s / (cfg_.steering_samples - 1);
        const VehicleControl u{v, v * kappa};
        const Node & parent = nodes_[idx];
        if (parent.time + n * cfg_.dt > cfg_.max_plan_duration + 1e-9) {
          continue;
        }
        VehicleState st = parent.state;
        bool ok = true;
        for (int i = 0; i < n && ok; ++i) {
          st = step_vehicle(st, u, cfg_.dt);
          ok = free(st);
        }
        if (!ok) {
          continue;
        }
        const std::vector<VehicleControl> seg(n, u);
        double g = parent.g + plan_cost(seg, cfg_);
        if (parent.direction != 0 && parent.direction != dir) {
          g += cfg_.switch_penalty;
        }
        const auto k = key(st.pose);
        if (closed_.count(k) != 0) {
          continue;
        }
        const auto it = best_g_.find(k);
        if (it != best_g_.end() && it->second <= g) {
          continue;
        }
        const double h = heuristic(st.pose);
        if (std::isinf(h) || g + h >= bound_) {
          continue;
        }
        best_g_[k] = g;
        nodes_.push_back({st, g, parent.time + n * cfg_.dt, idx, dir, u, n});
        push(static_cast<int>(nodes_.size()) - 1, g + cfg_.heuristic_weight * h);
      }
    }
  }

  // Tries Reeds-Shepp shots to each goal target, shortest first, with one drift correction.
  std::optional<std::vector<VehicleControl>> analytic(const Node & node)
  {
    std::vector<RsPath> candidates;
    for (const auto & t : goal_.targets) {
      auto c = reeds_shepp_candidates(node.state.pose, t, cfg_.min_turning_radius);
      candidates.insert(candidates.end(), c.begin(), c.end());
    }
    std::stable_sort(candidates.begin(), candidates.end(), [](const RsPath & a, const RsPath & b) {
      return a.length() < b.length();
    });
    const int tries = std::min<int>(4, static_cast<int>(candidates.size()));
    for (int i = 0; i < tries; ++i) {
      if (auto c = shoot(node, candidates[i])) {
        return c;
      }
    }
    return std::nullopt;
  }

  std::optional<std::vector<VehicleControl>> shoot(const Node & node, const RsPath & path)
  {
    const Pose2 target = path.end(node.state.pose);
    RsPath current = path;
    for (int attempt = 0; attempt < 2; ++attempt) {
      auto controls = controls_for_path(current, cfg_);
      if (node.time + controls.size() * cfg_.dt > cfg_.max_plan_duration + 1e-9) {
        return std::nullopt;
      }
      VehicleState st = node.state;
      bool ok = true;
      for (const auto & u : controls) {
        st = step_vehicle(st, u, cfg_.dt);
        if (!free(st)) {
          ok = false;
          break;
        }
      }
      if (!ok) {
        return std::nullopt;
      }
      if (goal_.satisfied(st)) {
        double g = node.g + plan_cost(controls, cfg_);
        if (!controls.empty() && node.direction != 0 && (controls.front().v > 0.0 ? 1 : -1) != node.direction) {
          g += cfg_.switch_penalty;
        }
        if (g >= bound_) {
          return std::nullopt;
        }
        return controls;
      }
      // Aim past the target by the integration drift and try once more.
      const Pose2 corrected{
        target.x + (target.x - st.pose.x), target.y + (target.y - st.pose.y),
        normalize_angle(target.theta + normalize_angle(target.theta - st.pose.theta))};
      current = reeds_shepp_shortest(node.state.pose, corrected, cfg_.min_turning_radius);
      if (current.length() > 1.5 * path.length() + 1.0) {
        return std::nullopt;
      }
    }
    return std::nullopt;
  }

  MotionPlan reconstruct(int idx, const std::vector<VehicleControl> & tail) const
  {
    std::vector<int> chain;
    for (int i = idx; i > 0; i = nodes_[i].parent) {
      chain.push_back(i);
    }
    MotionPlan plan;
    for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
      const Node & n = nodes_[*it];
      plan.controls.insert(plan.controls.end(), n.n_steps, n.control);
    }
    plan.controls.insert(plan.controls.end(), tail.begin(), tail.end());
    plan.states = rollout_vehicle(nodes_[0].state, plan.controls, cfg_.dt);
    return plan;
  }

  MotionPlan finish(MotionPlan plan) const
  {
    plan.cost = plan_cost(plan.controls, cfg_);
    plan.spot = goal_.spot;
    plan.goal_pose = goal_.pose;
    return plan;
  }

  const PlanningScene & scene_;
  const Goal & goal_;
  const PlannerConfig & cfg_;
  double bound_;
  std::optional<HeuristicGrid> grid_;
  std::vector<Node> nodes_;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open_;
  std::uint64_t seq_{0};
  std::unordered_map<std::int64_t, int> closed_;
  std::unordered_map<std::int64_t, double> best_g_;
};

}  // namespace

void PlannerConfig::validate() const
{
  auto positive = [](double v, const char * name) {
    if (!(v > 0.0)) {
      throw std::invalid_argument(std::string("planner.") + name + " must be positive");
    }
  };
  auto non_negative = [](double v, const char * name) {
    if (!(v >= 0.0)) {
      throw std::invalid_argument(std::string("planner.") + name + " must be non-negative");
    }
  };
  positive(dt, "dt");
  positive(xy_resolution, "xy_resolution");
  positive(heading_bins, "heading_bins");
  positive(min_turning_radius, "min_turning_radius");
  positive(forward_speed, "forward_speed");
  positive(reverse_speed, "reverse_speed");
  positive(forward_steps, "forward_steps");
  positive(reverse_steps, "reverse_steps");
  positive(steering_samples, "steering_samples");
  non_negative(reverse_penalty, "reverse_penalty");
  non_negative(switch_penalty, "switch_penalty");
  non_negative(time_penalty, "time_penalty");
  non_negative(heading_change_penalty, "heading_change_penalty");
  positive(node_budget, "node_budget");
  positive(analytic_interval, "analytic_interval");
  non_negative(analytic_radius, "analytic_radius");
  non_negative(inflation, "inflation");
  positive(max_plan_duration, "max_plan_duration");
  positive(heuristic_resolution, "heuristic_resolution");
  if (!(heuristic_weight >= 1.0)) {
    throw std::invalid_argument("PlannerConfig: heuristic_weight must be >= 1");
  }
  positive(analytic_near_interval, "analytic_near_interval");
  positive(goal_xy_tolerance, "goal_xy_tolerance");
  positive(goal_heading_tolerance, "goal_heading_tolerance");
}

PlanningScene PlanningScene::build(
  const ParkingLot & lot, std::span<const int> believed_occupied, std::span<const OrientedRect> extra, int except_spot)
{
  PlanningScene scene;
  scene.lot = &lot;
  for (int i : believed_occupied) {
    if (i != except_spot) {
      scene.obstacles.push_back(lot.spots.at(i));
    }
  }
  scene.obstacles.insert(scene.obstacles.end(), extra.begin(), extra.end());
  for (const auto & ob : scene.obstacles) {
    scene.obstacle_extents.push_back(ob.aabb_half_extent());
  }
  return scene;
}

bool PlanningScene::footprint_free(const OrientedRect & footprint, double inflation) const
{
  if (!lot->boundary.contains(footprint)) {
    return false;
  }
  const OrientedRect grown = footprint.inflated(inflation);
  const Vec2 half = grown.aabb_half_extent();
  const bool cached = obstacle_extents.size() == obstacles.size();
  for (std::size_t i = 0; i < obstacles.size(); ++i) {
    const auto & ob = obstacles[i];
    const Vec2 ob_half = cached ? obstacle_extents[i] : ob.aabb_half_extent();
    const Vec2 gap = (ob.center - grown.center).cwiseAbs() - half - ob_half;
    if (gap.x() > kGeomEps || gap.y() > kGeomEps) {
      continue;
    }
    if (obb_intersects(grown, ob)) {
      return false;
    }
  }
  return true;
}

double plan_cost(std::span<const VehicleControl> controls, const PlannerConfig & config)
{
  double forward = 0.0;
  double reverse = 0.0;
  double turning = 0.0;
  int switches = 0;
  int last_dir = 0;
  for (const auto & u : controls) {
    const double d = std::abs(u.v) * config.dt;
    if (u.v > 0.0) {
      forward += d;
    } else if (u.v < 0.0) {
      reverse += d;
    }
    turning += std::abs(u.omega) * config.dt;
    const int dir = u.v > 0.0 ? 1 : (u.v < 0.0 ? -1 : 0);
    if (dir != 0) {
      if (last_dir != 0 && dir != last_dir) {
        ++switches;
      }
      last_dir = dir;
    }
  }
  const double duration = static_cast<double>(controls.size()) * config.dt;
  return forward + config.reverse_penalty * reverse + config.switch_penalty * switches +
         config.time_penalty * duration + config.heading_change_penalty * turning;
}

std::optional<MotionPlan> plan_park(
  const VehicleState & start, int spot, const ParkingLot & lot, std::span<const int> believed_occupied,
  const PlannerConfig & config, std::span<const OrientedRect> extra_obstacles, double cost_bound, SearchStats * stats)
{
  if (spot < 0 || spot >= lot.n_spot()) {
    throw std::invalid_argument("plan_park: spot index " + std::to_string(spot) + " out of range");
  }
  if (std::find(believed_occupied.begin(), believed_occupied.end(), spot) != believed_occupied.end()) {
    return std::nullopt;
  }
  const PlanningScene scene = PlanningScene::build(lot, believed_occupied, extra_obstacles, spot);
  Goal goal;
  goal.spot = spot;
  goal.spot_rect = &lot.spots[spot];
  goal.pose = lot.spots[spot].pose();
  goal.targets = {goal.pose, {goal.pose.x, goal.pose.y, normalize_angle(goal.pose.theta + std::numbers::pi)}};
  HybridAStar search(scene, goal, config, cost_bound);
  return search.run(start, stats);
}

std::optional<MotionPlan> plan_to_pose(
  const VehicleState & start, const Pose2 & goal_pose, const ParkingLot & lot, std::span<const int> believed_occupied,
  const PlannerConfig & config, std::span<const OrientedRect> extra_obstacles, double cost_bound, SearchStats * stats)
{
  const PlanningScene scene = PlanningScene::build(lot, believed_occupied, extra_obstacles);
  Goal goal;
  goal.pose = goal_pose;
  goal.targets = {goal_pose};
  goal.xy_tol = config.goal_xy_tolerance;
  goal.heading_tol = config.goal_heading_tolerance;
  HybridAStar search(scene, goal, config, cost_bound);
  return search.run(start, stats);
}

ValidationResult validate_plan(
  const MotionPlan & plan, int cursor, std::span<const PredictedTrajectory> predictions, const PlanningScene & scene,
  double inflation)
{
  const int n = plan.steps();
  for (int step = cursor + 1; step <= n; ++step) {
    const int j = step - cursor - 1;
    const OrientedRect ego = plan.states[step].footprint();
    if (!scene.footprint_free(ego, inflation)) {
      return ValidationResult::blocked(j + 1);
    }
    const OrientedRect grown = ego.inflated(inflation);
    const double r = grown.bounding_radius();
    for (const auto & pred : predictions) {
      if (j >= pred.steps()) {
        continue;
      }
      const Pose2 & p = pred.poses[j];
      if (pred.agent == PredictedTrajectory::Agent::Pedestrian) {
        if (disc_rect_intersects(p.position(), pred.radius, grown)) {
          return ValidationResult::blocked(j + 1);
        }
        continue;
      }
      const OrientedRect other = OrientedRect::at(p, pred.length, pred.width);
      if ((other.center - grown.center).norm() > r + other.bounding_radius()) {
        continue;
      }
      if (obb_intersects(grown, other)) {
        return ValidationResult::blocked(j + 1);
      }
    }
  }
  return ValidationResult::pass();
}

}  // namespace avp
