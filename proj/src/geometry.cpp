#include "avp/geometry.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace avp
{

namespace
{

constexpr double kInf = std::numeric_limits<double>::infinity();

// Liang-Barsky clip of the parametric segment p + t*d, t in [t0, t1], against an axis box in
// the same frame. Returns false when the clipped interval is empty.
bool clip_to_box(
  const Vec2 & p, const Vec2 & d, const Vec2 & lo, const Vec2 & hi, double tol, double & t0,
  double & t1)
{
  for (int axis = 0; axis < 2; ++axis) {
    const double lo_a = lo[axis] - tol;
    const double hi_a = hi[axis] + tol;
    if (std::abs(d[axis]) < 1e-15) {
      if (p[axis] < lo_a || p[axis] > hi_a) {
        return false;
      }
      continue;
    }
    double ta = (lo_a - p[axis]) / d[axis];
    double tb = (hi_a - p[axis]) / d[axis];
    if (ta > tb) {
      std::swap(ta, tb);
    }
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
    if (t0 > t1) {
      return false;
    }
  }
  return true;
}

double projection_radius(const OrientedRect & r, const Vec2 & axis)
{
  return 0.5 * r.length * std::abs(r.axis_long().dot(axis)) +
         0.5 * r.width * std::abs(r.axis_lat().dot(axis));
}

}  // namespace

double normalize_angle(double angle)
{
  constexpr double pi = std::numbers::pi;
  if (angle >= -pi && angle <= pi) {
    return angle;
  }
  double a = std::fmod(angle + pi, 2.0 * pi);
  if (a < 0.0) {
    a += 2.0 * pi;
  }
  return a - pi;
}

OrientedRect OrientedRect::at(const Pose2 & pose, double length, double width)
{
  return {pose.position(), pose.theta, length, width};
}

std::array<Vec2, 4> OrientedRect::corners() const
{
  const Vec2 hl = 0.5 * length * axis_long();
  const Vec2 hw = 0.5 * width * axis_lat();
  return {center + hl + hw, center - hl + hw, center - hl - hw, center + hl - hw};
}

Vec2 OrientedRect::to_local(const Vec2 & p) const
{
  const Vec2 d = p - center;
  return {d.dot(axis_long()), d.dot(axis_lat())};
}

bool OrientedRect::contains(const Vec2 & p, double tol) const
{
  const Vec2 local = to_local(p);
  return std::abs(local.x()) <= 0.5 * length + tol && std::abs(local.y()) <= 0.5 * width + tol;
}

OrientedRect OrientedRect::inflated(double margin) const
{
  return {center, heading, length + 2.0 * margin, width + 2.0 * margin};
}

bool AxisBox::contains(const Vec2 & p, double tol) const
{
  return p.x() >= min.x() - tol && p.x() <= max.x() + tol && p.y() >= min.y() - tol &&
         p.y() <= max.y() + tol;
}

bool AxisBox::contains(const OrientedRect & r, double tol) const
{
  for (const auto & c : r.corners()) {
    if (!contains(c, tol)) {
      return false;
    }
  }
  return true;
}

double Road::heading() const { return std::atan2(end.y() - start.y(), end.x() - start.x()); }

OrientedRect Road::rect() const { return road_rectangle(start, end, width); }

void ParkingLot::validate() const
{
  if (spots.empty()) {
    throw std::invalid_argument("parking lot needs at least one spot");
  }
  if (roads.empty()) {
    throw std::invalid_argument("parking lot needs at least one road");
  }
  if (!(boundary.max.x() > boundary.min.x() && boundary.max.y() > boundary.min.y())) {
    throw std::invalid_argument("parking lot boundary is empty");
  }
  for (std::size_t i = 0; i < spots.size(); ++i) {
    if (!spots[i].valid()) {
      throw std::invalid_argument("spot " + std::to_string(i) + " has non-positive size");
    }
    if (!boundary.contains(spots[i], 1e-6)) {
      throw std::invalid_argument("spot " + std::to_string(i) + " leaves the lot boundary");
    }
  }
  for (std::size_t j = 0; j < roads.size(); ++j) {
    if (!boundary.contains(roads[j].rect(), 1e-6)) {
      throw std::invalid_argument("road " + std::to_string(j) + " leaves the lot boundary");
    }
  }
  if (!boundary.contains(entrance, 1e-6)) {
    throw std::invalid_argument("entrance lies outside the lot");
  }
}

bool obb_contains(const OrientedRect & outer, const OrientedRect & inner)
{
  for (const auto & c : inner.corners()) {
    if (!outer.contains(c)) {
      return false;
    }
  }
  return true;
}

bool obb_intersects(const OrientedRect & a, const OrientedRect & b)
{
  const Vec2 d = b.center - a.center;
  const std::array<Vec2, 4> axes{a.axis_long(), a.axis_lat(), b.axis_long(), b.axis_lat()};
  for (const auto & axis : axes) {
    const double gap = std::abs(d.dot(axis)) - projection_radius(a, axis) - projection_radius(b, axis);
    if (gap > kGeomEps) {
      return false;
    }
  }
  return true;
}

bool disc_rect_intersects(const Vec2 & center, double radius, const OrientedRect & rect)
{
  const Vec2 local = rect.to_local(center);
  const double dx = std::max(std::abs(local.x()) - 0.5 * rect.length, 0.0);
  const double dy = std::max(std::abs(local.y()) - 0.5 * rect.width, 0.0);
  return std::hypot(dx, dy) <= radius + kGeomEps;
}

bool segment_rect_intersects(const Vec2 & a, const Vec2 & b, const OrientedRect & rect)
{
  const Vec2 pa = rect.to_local(a);
  const Vec2 pb = rect.to_local(b);
  const Vec2 half{0.5 * rect.length, 0.5 * rect.width};
  double t0 = 0.0;
  double t1 = 1.0;
  return clip_to_box(pa, pb - pa, -half, half, kGeomEps, t0, t1);
}

bool segment_disc_intersects(const Vec2 & a, const Vec2 & b, const Vec2 & center, double radius)
{
  const Vec2 ab = b - a;
  const double len2 = ab.squaredNorm();
  double t = len2 > 0.0 ? (center - a).dot(ab) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return (a + t * ab - center).norm() <= radius + kGeomEps;
}

OrientedRect road_rectangle(const Vec2 & start, const Vec2 & end, double width)
{
  const Vec2 d = end - start;
  const double len = d.norm();
  if (len <= kGeomEps) {
    throw std::invalid_argument("road_rectangle: start and end coincide");
  }
  if (width < 0.0) {
    throw std::invalid_argument("road_rectangle: negative width");
  }
  return {0.5 * (start + end), std::atan2(d.y(), d.x()), len + width, width};
}

SensingRegion SensingRegion::disc(double radius)
{
  SensingRegion r;
  r.shape = Shape::Disc;
  r.radius = radius;
  return r;
}

SensingRegion SensingRegion::rect(double length, double width, const Vec2 & offset)
{
  SensingRegion r;
  r.shape = Shape::Rect;
  r.length = length;
  r.width = width;
  r.offset = offset;
  return r;
}

bool PlacedRegion::contains(const Vec2 & p, double tol) const
{
  if (shape == SensingRegion::Shape::Disc) {
    return (p - center).norm() <= radius + tol;
  }
  return rect.contains(p, tol);
}

PlacedRegion place_region(const SensingRegion & base, const Pose2 & ego)
{
  PlacedRegion placed;
  placed.shape = base.shape;
  const Eigen::Rotation2Dd rot(ego.theta);
  if (base.shape == SensingRegion::Shape::Disc) {
    placed.center = ego.position();
    placed.radius = base.radius;
  } else {
    placed.center = ego.position() + rot * base.offset;
    placed.rect = {placed.center, ego.theta, base.length, base.width};
  }
  return placed;
}

double ray_rect_distance(const Vec2 & origin, const Vec2 & dir, const OrientedRect & rect)
{
  const Vec2 p = rect.to_local(origin);
  const Vec2 d{dir.dot(rect.axis_long()), dir.dot(rect.axis_lat())};
  const Vec2 half{0.5 * rect.length, 0.5 * rect.width};
  double t0 = 0.0;
  double t1 = kInf;
  if (!clip_to_box(p, d, -half, half, 0.0, t0, t1)) {
    return -1.0;
  }
  return t0;
}

double ray_exit_distance(const Vec2 & origin, const Vec2 & dir, const AxisBox & box)
{
  double t_exit = kInf;
  for (int axis = 0; axis < 2; ++axis) {
    if (dir[axis] > 1e-15) {
      t_exit = std::min(t_exit, (box.max[axis] - origin[axis]) / dir[axis]);
    } else if (dir[axis] < -1e-15) {
      t_exit = std::min(t_exit, (box.min[axis] - origin[axis]) / dir[axis]);
    }
  }
  return std::max(t_exit, 0.0);
}

double ray_exit_distance(const Vec2 & origin, const Vec2 & dir, const PlacedRegion & region)
{
  if (region.shape == SensingRegion::Shape::Disc) {
    // |o + t d - c|^2 = r^2 with |d| = 1; take the larger root.
    const Vec2 oc = origin - region.center;
    const double b = oc.dot(dir);
    const double c = oc.squaredNorm() - region.radius * region.radius;
    const double disc = b * b - c;
    if (disc < 0.0) {
      return 0.0;
    }
    return std::max(-b + std::sqrt(disc), 0.0);
  }
  const OrientedRect & r = region.rect;
  const Vec2 p = r.to_local(origin);
  const Vec2 d{dir.dot(r.axis_long()), dir.dot(r.axis_lat())};
  AxisBox local{{-0.5 * r.length, -0.5 * r.width}, {0.5 * r.length, 0.5 * r.width}};
  return ray_exit_distance(p, d, local);
}

Ray cast_ray(
  const Vec2 & origin, const Vec2 & direction, const ParkingLot & lot,
  std::span<const OrientedRect> vehicles, const PlacedRegion & region)
{
  Ray ray;
  ray.origin = origin;
  ray.direction = direction;

  double best = ray_exit_distance(origin, direction, region);
  ray.hit_kind = HitKind::SensingBoundary;

  const double t_lot = ray_exit_distance(origin, direction, lot.boundary);
  if (t_lot < best) {
    best = t_lot;
    ray.hit_kind = HitKind::LotBoundary;
  }
  for (std::size_t k = 0; k < vehicles.size(); ++k) {
    const double t = ray_rect_distance(origin, direction, vehicles[k]);
    if (t >= 0.0 && t < best) {
      best = t;
      ray.hit_kind = HitKind::Vehicle;
      ray.vehicle = static_cast<int>(k);
    }
  }
  if (ray.hit_kind != HitKind::Vehicle) {
    ray.vehicle = -1;
  }
  ray.hit_point = origin + best * direction;
  return ray;
}

std::vector<Vec2> segment_region_boundary_points(const Vec2 & a, const Vec2 & b, const PlacedRegion & region)
{
  std::vector<Vec2> out;
  const Vec2 d = b - a;
  if (region.shape == SensingRegion::Shape::Disc) {
    const Vec2 ac = a - region.center;
    const double qa = d.squaredNorm();
    if (qa <= 0.0) {
      return out;
    }
    const double qb = 2.0 * ac.dot(d);
    const double qc = ac.squaredNorm() - region.radius * region.radius;
    const double disc = qb * qb - 4.0 * qa * qc;
    if (disc < 0.0) {
      return out;
    }
    const double s = std::sqrt(disc);
    const double roots[2] = {(-qb - s) / (2.0 * qa), (-qb + s) / (2.0 * qa)};
    for (int i = 0; i < 2; ++i) {
      if (i == 1 && s == 0.0) {
        break;
      }
      if (roots[i] >= -kGeomEps && roots[i] <= 1.0 + kGeomEps) {
        out.push_back(a + std::clamp(roots[i], 0.0, 1.0) * d);
      }
    }
    return out;
  }
  const OrientedRect & r = region.rect;
  const Vec2 pa = r.to_local(a);
  const Vec2 pd = r.to_local(b) - pa;
  const Vec2 half{0.5 * r.length, 0.5 * r.width};
  double t0 = 0.0;
  double t1 = 1.0;
  if (!clip_to_box(pa, pd, -half, half, 0.0, t0, t1)) {
    return out;
  }
  if (t0 > kGeomEps) {
    out.push_back(a + t0 * d);
  }
  if (t1 < 1.0 - kGeomEps && t1 > t0) {
    out.push_back(a + t1 * d);
  }
  return out;
}

}  // namespace avp
