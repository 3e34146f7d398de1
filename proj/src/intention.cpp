#include "avp/intention.hpp"

#include "avp/trajectory.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace avp
{

namespace
{

// Paints `value` (max-combined) into every cell whose center lies inside `rect`.
void fill_rect(BevRaster & bev, int channel, const OrientedRect & rect, float value)
{
  if (value <= 0.0f) {
    return;
  }
  const Vec2 fwd = bev.frame.heading();
  const Vec2 left{-fwd.y(), fwd.x()};
  const Vec2 origin = bev.frame.position();
  const double half_rows = 0.5 * bev.rows();
  const double half_cols = 0.5 * bev.cols();
  double rmin = 1e18, rmax = -1e18, cmin = 1e18, cmax = -1e18;
  for (const auto & c : rect.corners()) {
    const Vec2 d = c - origin;
    const double r = half_rows - d.dot(fwd) / bev.resolution;
    const double col = half_cols - d.dot(left) / bev.resolution;
    rmin = std::min(rmin, r);
    rmax = std::max(rmax, r);
    cmin = std::min(cmin, col);
    cmax = std::max(cmax, col);
  }
  const int r0 = std::max(0, static_cast<int>(std::floor(rmin)));
  const int r1 = std::min(bev.rows() - 1, static_cast<int>(std::ceil(rmax)));
  const int c0 = std::max(0, static_cast<int>(std::floor(cmin)));
  const int c1 = std::min(bev.cols() - 1, static_cast<int>(std::ceil(cmax)));
  auto & ch = bev.channels[channel];
  for (int r = r0; r <= r1; ++r) {
    for (int c = c0; c <= c1; ++c) {
      if (rect.contains(bev.cell_center(r, c), 0.0)) {
        ch(r, c) = std::max(ch(r, c), value);
      }
    }
  }
}

bool contains_sorted(const std::vector<int> & v, int x) { return std::binary_search(v.begin(), v.end(), x); }

// Portion of segment [a, b] inside `rect`, as parameters [t0, t1]; nullopt if disjoint.
std::optional<std::pair<double, double>> clip_segment(const Vec2 & a, const Vec2 & b, const OrientedRect & rect)
{
  const Vec2 pa = rect.to_local(a);
  const Vec2 d = rect.to_local(b) - pa;
  const double half[2] = {0.5 * rect.length, 0.5 * rect.width};
  double t0 = 0.0;
  double t1 = 1.0;
  for (int axis = 0; axis < 2; ++axis) {
    if (std::abs(d[axis]) < 1e-15) {
      if (std::abs(pa[axis]) > half[axis]) {
        return std::nullopt;
      }
      continue;
    }
    double ta = (-half[axis] - pa[axis]) / d[axis];
    double tb = (half[axis] - pa[axis]) / d[axis];
    if (ta > tb) {
      std::swap(ta, tb);
    }
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
    if (t0 > t1) {
      return std::nullopt;
    }
  }
  return std::make_pair(t0, t1);
}

double point_segment_distance(const Vec2 & p, const Vec2 & a, const Vec2 & b)
{
  const Vec2 ab = b - a;
  const double len2 = ab.squaredNorm();
  const double t = len2 > 0.0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
  return (a + t * ab - p).norm();
}

double segment_segment_distance(const Vec2 & a0, const Vec2 & a1, const Vec2 & b0, const Vec2 & b1)
{
  auto cross = [](const Vec2 & u, const Vec2 & v) { return u.x() * v.y() - u.y() * v.x(); };
  const Vec2 r = a1 - a0;
  const Vec2 s = b1 - b0;
  const double denom = cross(r, s);
  if (std::abs(denom) > 1e-12) {
    const double t = cross(b0 - a0, s) / denom;
    const double u = cross(b0 - a0, r) / denom;
    if (t >= 0.0 && t <= 1.0 && u >= 0.0 && u <= 1.0) {
      return 0.0;
    }
  }
  return std::min(
    {point_segment_distance(a0, b0, b1), point_segment_distance(a1, b0, b1), point_segment_distance(b0, a0, a1),
     point_segment_distance(b1, a0, a1)});
}

std::vector<double> softmax(const std::vector<double> & logits)
{
  std::vector<double> out(logits.size(), 0.0);
  if (logits.empty()) {
    return out;
  }
  const double top = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - top);
    sum += out[i];
  }
  for (auto & p : out) {
    p /= sum;
  }
  return out;
}

IntentionDistribution split(const ScoringRequest & request, const std::vector<double> & probs)
{
  IntentionDistribution dist;
  const std::size_t n_spot = request.spots.size();
  for (std::size_t i = 0; i < n_spot; ++i) {
    dist.spot_probs.emplace_back(request.spots[i], probs[i]);
  }
  dist.exploration_points = request.exploration_points;
  dist.exploration_probs.assign(probs.begin() + n_spot, probs.end());
  std::sort(dist.spot_probs.begin(), dist.spot_probs.end());
  return dist;
}

}  // namespace

std::optional<std::pair<int, int>> BevRaster::cell_of(const Vec2 & p) const
{
  const Vec2 fwd = frame.heading();
  const Vec2 left{-fwd.y(), fwd.x()};
  const Vec2 d = p - frame.position();
  const int r = static_cast<int>(std::floor(0.5 * rows() - d.dot(fwd) / resolution));
  const int c = static_cast<int>(std::floor(0.5 * cols() - d.dot(left) / resolution));
  if (r < 0 || r >= rows() || c < 0 || c >= cols()) {
    return std::nullopt;
  }
  return std::make_pair(r, c);
}

Vec2 BevRaster::cell_center(int row, int col) const
{
  const Vec2 fwd = frame.heading();
  const Vec2 left{-fwd.y(), fwd.x()};
  const double f = (0.5 * rows() - row - 0.5) * resolution;
  const double l = (0.5 * cols() - col - 0.5) * resolution;
  return frame.position() + f * fwd + l * left;
}

std::vector<unsigned char> BevRaster::to_bytes() const
{
  std::vector<unsigned char> out;
  out.reserve(static_cast<std::size_t>(rows()) * cols() * 3);
  for (int r = 0; r < rows(); ++r) {
    for (int c = 0; c < cols(); ++c) {
      for (int ch = 0; ch < 3; ++ch) {
        const float v = std::clamp(channels[ch](r, c), 0.0f, 1.0f);
        out.push_back(static_cast<unsigned char>(std::lround(v * 255.0f)));
      }
    }
  }
  return out;
}

OrientedRect bev_window(const Pose2 & vehicle, double window)
{
  return {vehicle.position(), vehicle.theta, window, window};
}

BevRaster reconstruct_bev(
  const BevContext & ctx, int target_vehicle, std::optional<int> marked_spot, const IntentionParams & params)
{
  const Observation & obs = *ctx.obs;
  const ObservedVehicle * target = obs.find_dynamic(target_vehicle);
  if (target == nullptr) {
    throw std::invalid_argument("reconstruct_bev: vehicle " + std::to_string(target_vehicle) + " not observed");
  }
  const ParkingLot & lot = *ctx.lot;
  const int cells = static_cast<int>(std::lround(params.window / params.resolution));
  BevRaster bev;
  bev.frame = target->pose();
  bev.resolution = params.resolution;
  for (auto & ch : bev.channels) {
    ch = Eigen::MatrixXf::Zero(cells, cells);
  }
  const OrientedRect window = bev_window(bev.frame, params.window);
  const double reach = window.bounding_radius();
  auto near = [&](const OrientedRect & r) {
    return (r.center - window.center).norm() <= reach + r.bounding_radius();
  };

  for (const auto & road : lot.roads) {
    const OrientedRect r = road.rect();
    if (near(r)) {
      fill_rect(bev, 0, r, 1.0f);
    }
  }
  for (const auto & spot : lot.spots) {
    if (near(spot)) {
      fill_rect(bev, 0, spot, 0.5f);
    }
  }

  for (const auto & v : obs.static_vehicles) {
    fill_rect(bev, 1, v.footprint(), 1.0f);
  }
  // Unobserved spots believed occupied get a default-size vehicle.
  for (int i = 0; i < lot.n_spot(); ++i) {
    const OrientedRect & spot = lot.spots[i];
    if (!window.contains(spot.center, 0.0) || (*ctx.beliefs)[i] < params.beta) {
      continue;
    }
    if (contains_sorted(obs.vacant_spots, i) || contains_sorted(obs.occupied_spots, i)) {
      continue;
    }
    fill_rect(bev, 1, OrientedRect::at(spot.pose(), params.l_def, params.w_def), 1.0f);
  }
  // Moving vehicles, ego included, with past poses fading out over t_hist.
  auto draw_history = [&](const std::vector<Pose2> & history, double length, double width) {
    const int n = static_cast<int>(history.size());
    for (int j = 0; j < n; ++j) {
      const double age = (n - 1 - j) * params.dt;
      const double alpha = params.t_hist > 0.0 ? std::max(0.0, 1.0 - age / params.t_hist) : (j == n - 1 ? 1.0 : 0.0);
      const OrientedRect fp = OrientedRect::at(history[j], length, width);
      if (near(fp)) {
        fill_rect(bev, 1, fp, static_cast<float>(alpha));
      }
    }
  };
  for (const auto & v : obs.dynamic_vehicles) {
    draw_history(v.history, v.length, v.width);
  }
  if (!ctx.ego_history.empty()) {
    draw_history(ctx.ego_history, ctx.ego_length, ctx.ego_width);
  }

  if (marked_spot) {
    if (*marked_spot < 0 || *marked_spot >= lot.n_spot()) {
      throw std::invalid_argument("reconstruct_bev: marked spot out of range");
    }
    fill_rect(bev, 2, lot.spots[*marked_spot], 1.0f);
  }
  return bev;
}

std::vector<int> candidate_spots_for(
  const Pose2 & vehicle, const ParkingLot & lot, const BeliefMap & beliefs, const IntentionParams & params)
{
  const OrientedRect window = bev_window(vehicle, params.window);
  std::vector<int> out;
  for (int i = 0; i < lot.n_spot(); ++i) {
    if (beliefs[i] < params.beta && window.contains(lot.spots[i].center, 0.0)) {
      out.push_back(i);
    }
  }
  return out;
}

IntentionFeatures compute_features(
  const ObservedVehicle & vehicle, const Vec2 & spot_center, const ParkingLot & lot, double dt, double first_seen,
  double clock)
{
  IntentionFeatures f;
  const Pose2 & pose = vehicle.pose();
  const Vec2 to_spot = spot_center - pose.position();
  f.d = to_spot.norm();
  f.a = f.d > kGeomEps ? std::clamp(pose.heading().dot(to_spot) / f.d, -1.0, 1.0) : 1.0;
  f.v_bar = mean_speed(vehicle.history, dt);
  f.d_ent = (lot.entrance - pose.position()).norm();
  f.t_lot = std::max(0.0, clock - first_seen);
  return f;
}

double forward_cosine(const Pose2 & vehicle, const Pose2 & q)
{
  const Vec2 d = q.position() - vehicle.position();
  const double n = d.norm();
  const double toward = n > kGeomEps ? vehicle.heading().dot(d) / n : 1.0;
  return 0.5 * (toward + std::cos(q.theta - vehicle.theta));
}

std::vector<Pose2> exploration_candidates_for(const Pose2 & vehicle, const ParkingLot & lot, double window_size)
{
  const OrientedRect window = bev_window(vehicle, window_size);
  struct Clipped
  {
    int road;
    Vec2 a, b;
    bool a_on_edge, b_on_edge;
  };
  std::vector<Clipped> pieces;
  for (int j = 0; j < static_cast<int>(lot.roads.size()); ++j) {
    const Road & road = lot.roads[j];
    const auto span = clip_segment(road.start, road.end, window);
    if (!span) {
      continue;
    }
    const Vec2 d = road.end - road.start;
    pieces.push_back(
      {j, road.start + span->first * d, road.start + span->second * d, span->first > 1e-12,
       span->second < 1.0 - 1e-12});
  }
  if (pieces.empty()) {
    return {};
  }

  // Flood fill from the piece(s) the vehicle is driving on.
  const int n = static_cast<int>(pieces.size());
  std::vector<char> reached(n, 0);
  std::vector<int> stack;
  double nearest = 1e18;
  int nearest_idx = 0;
  for (int i = 0; i < n; ++i) {
    const double dist = point_segment_distance(vehicle.position(), pieces[i].a, pieces[i].b);
    if (dist <= 0.5 * lot.roads[pieces[i].road].width) {
      reached[i] = 1;
      stack.push_back(i);
    }
    if (dist < nearest) {
      nearest = dist;
      nearest_idx = i;
    }
  }
  if (stack.empty()) {
    reached[nearest_idx] = 1;
    stack.push_back(nearest_idx);
  }
  while (!stack.empty()) {
    const int i = stack.back();
    stack.pop_back();
    for (int k = 0; k < n; ++k) {
      if (!reached[k] && segment_segment_distance(pieces[i].a, pieces[i].b, pieces[k].a, pieces[k].b) <= 1e-6) {
        reached[k] = 1;
        stack.push_back(k);
      }
    }
  }

  std::vector<Pose2> out;
  for (int i = 0; i < n; ++i) {
    if (!reached[i]) {
      continue;
    }
    const double heading = lot.roads[pieces[i].road].heading();
    for (const auto & [p, on_edge] : {std::pair{pieces[i].a, pieces[i].a_on_edge}, std::pair{pieces[i].b, pieces[i].b_on_edge}}) {
      if (!on_edge) {
        continue;
      }
      out.push_back({p.x(), p.y(), normalize_angle(heading)});
      out.push_back({p.x(), p.y(), normalize_angle(heading + std::numbers::pi)});
    }
  }
  return out;
}

double IntentionDistribution::total() const
{
  double sum = 0.0;
  for (const auto & [spot, p] : spot_probs) {
    sum += p;
  }
  for (double p : exploration_probs) {
    sum += p;
  }
  return sum;
}

SpotIntents IntentionDistribution::spot_map() const { return {spot_probs.begin(), spot_probs.end()}; }

double HeuristicScorer::spot_logit(const IntentionFeatures & f) const
{
  return w_.w_d * (1.0 - f.d / w_.d_max) + w_.w_a * f.a + w_.w_v * std::exp(-f.v_bar / w_.v0);
}

double HeuristicScorer::exploration_logit(double forward_cos, double v_bar) const
{
  return w_.w_e * forward_cos + w_.w_v * (v_bar / w_.v_max);
}

IntentionDistribution HeuristicScorer::score(const ScoringRequest & request)
{
  const std::size_t total = request.spots.size() + request.exploration_points.size();
  if (total == 0) {
    throw std::invalid_argument("score: vehicle has no candidates");
  }
  std::vector<double> logits;
  logits.reserve(total);
  for (const auto & f : request.spot_features) {
    logits.push_back(spot_logit(f));
  }
  for (const auto & q : request.exploration_points) {
    logits.push_back(exploration_logit(forward_cosine(request.pose, q), request.v_bar));
  }
  return split(request, softmax(logits));
}

std::vector<VehicleIntent> estimate_intentions(
  const BevContext & ctx, const std::map<int, double> & first_seen, double clock, IntentionScorer & scorer,
  const IntentionParams & params)
{
  std::vector<VehicleIntent> out;
  for (const auto & v : ctx.obs->dynamic_vehicles) {
    ScoringRequest req;
    req.vehicle = v.id;
    req.pose = v.pose();
    req.spots = candidate_spots_for(req.pose, *ctx.lot, *ctx.beliefs, params);
    req.exploration_points = exploration_candidates_for(req.pose, *ctx.lot, params.window);
    if (req.spots.empty() && req.exploration_points.empty()) {
      continue;
    }
    const auto seen = first_seen.find(v.id);
    const double t0 = seen == first_seen.end() ? clock : seen->second;
    IntentionFeatures base = compute_features(v, req.pose.position(), *ctx.lot, params.dt, t0, clock);
    req.v_bar = base.v_bar;
    req.d_ent = base.d_ent;
    req.t_lot = base.t_lot;
    for (int i : req.spots) {
      req.spot_features.push_back(compute_features(v, ctx.lot->spots[i].center, *ctx.lot, params.dt, t0, clock));
    }
    if (scorer.needs_rasters()) {
      req.rasters.push_back(reconstruct_bev(ctx, v.id, std::nullopt, params));
      for (int i : req.spots) {
        BevRaster marked = req.rasters.front();
        fill_rect(marked, 2, ctx.lot->spots[i], 1.0f);
        req.rasters.push_back(std::move(marked));
      }
    }
    VehicleIntent vi;
    vi.vehicle = v.id;
    vi.v_bar = req.v_bar;
    vi.dist = scorer.score(req);
    out.push_back(std::move(vi));
  }
  return out;
}

}  // namespace avp
