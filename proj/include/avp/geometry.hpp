#pragma once

#include <Eigen/Core>

#include <array>
#include <cmath>
#include <span>
#include <vector>

namespace avp
{

using Vec2 = Eigen::Vector2d;

/// Tolerance used by every closed-set predicate; contact within this distance counts as touching.
inline constexpr double kGeomEps = 1e-9;

/// Wraps an angle into [-pi, pi].
double normalize_angle(double angle);

inline Vec2 unit_vector(double angle) { return {std::cos(angle), std::sin(angle)}; }

struct Pose2
{
  double x{0.0};
  double y{0.0};
  double theta{0.0};

  Vec2 position() const { return {x, y}; }
  Vec2 heading() const { return unit_vector(theta); }
};

/// Closed oriented rectangle. `length` runs along `heading`, `width` across it.
struct OrientedRect
{
  Vec2 center{Vec2::Zero()};
  double heading{0.0};
  double length{0.0};
  double width{0.0};

  static OrientedRect at(const Pose2 & pose, double length, double width);

  Pose2 pose() const { return {center.x(), center.y(), heading}; }
  Vec2 axis_long() const { return unit_vector(heading); }
  Vec2 axis_lat() const { return {-std::sin(heading), std::cos(heading)}; }
  /// Counter-clockwise, starting at front-left.
  std::array<Vec2, 4> corners() const;
  /// Point in rectangle-local coordinates (x along heading).
  Vec2 to_local(const Vec2 & p) const;
  bool contains(const Vec2 & p, double tol = kGeomEps) const;
  OrientedRect inflated(double margin) const;
  double bounding_radius() const { return 0.5 * std::hypot(length, width); }
  /// Half extents of the axis-aligned bounding box.
  Vec2 aabb_half_extent() const
  {
    const double c = std::abs(std::cos(heading));
    const double s = std::abs(std::sin(heading));
    return {0.5 * (length * c + width * s), 0.5 * (length * s + width * c)};
  }
  bool valid() const { return length > 0.0 && width > 0.0; }
};

struct AxisBox
{
  Vec2 min{Vec2::Zero()};
  Vec2 max{Vec2::Zero()};

  bool contains(const Vec2 & p, double tol = kGeomEps) const;
  bool contains(const OrientedRect & r, double tol = kGeomEps) const;
  Vec2 center() const { return 0.5 * (min + max); }
  Vec2 extent() const { return max - min; }
};

struct Road
{
  Vec2 start{Vec2::Zero()};
  Vec2 end{Vec2::Zero()};
  double width{0.0};

  double heading() const;
  OrientedRect rect() const;
};

struct ParkingLot
{
  AxisBox boundary;
  Vec2 entrance{Vec2::Zero()};
  std::vector<OrientedRect> spots;
  std::vector<Road> roads;

  int n_spot() const { return static_cast<int>(spots.size()); }
  /// Throws std::invalid_argument when the lot violates its structural invariants.
  void validate() const;
};

/// True iff every corner of `inner` lies in the closed set `outer`.
bool obb_contains(const OrientedRect & outer, const OrientedRect & inner);

/// Separating-axis overlap test on closed rectangles.
bool obb_intersects(const OrientedRect & a, const OrientedRect & b);

/// Closed disc vs closed rectangle.
bool disc_rect_intersects(const Vec2 & center, double radius, const OrientedRect & rect);

bool segment_rect_intersects(const Vec2 & a, const Vec2 & b, const OrientedRect & rect);

bool segment_disc_intersects(const Vec2 & a, const Vec2 & b, const Vec2 & center, double radius);

/// Minkowski sum of the segment [start, end] with a square of side `width` aligned to the segment.
/// The result extends width/2 past both endpoints. Throws on a degenerate segment.
OrientedRect road_rectangle(const Vec2 & start, const Vec2 & end, double width);

/// Base sensing shape in the ego frame: a disc around the ego or a rectangle offset along it.
struct SensingRegion
{
  enum class Shape { Disc, Rect };

  Shape shape{Shape::Disc};
  double radius{11.5};
  double length{0.0};
  double width{0.0};
  Vec2 offset{Vec2::Zero()};

  static SensingRegion disc(double radius);
  static SensingRegion rect(double length, double width, const Vec2 & offset = Vec2::Zero());
};

/// A sensing region rotated by the ego heading and translated to the ego position.
struct PlacedRegion
{
  SensingRegion::Shape shape{SensingRegion::Shape::Disc};
  Vec2 center{Vec2::Zero()};
  double radius{0.0};
  OrientedRect rect;

  bool contains(const Vec2 & p, double tol = kGeomEps) const;
};

PlacedRegion place_region(const SensingRegion & base, const Pose2 & ego);

enum class HitKind { LotBoundary, SensingBoundary, Vehicle };

struct Ray
{
  Vec2 origin{Vec2::Zero()};
  Vec2 direction{Vec2::UnitX()};
  Vec2 hit_point{Vec2::Zero()};
  HitKind hit_kind{HitKind::SensingBoundary};
  /// Index into the vehicle list passed to cast_ray when hit_kind == Vehicle, else -1.
  int vehicle{-1};

  double length() const { return (hit_point - origin).norm(); }
};

/// Distance along `dir` from `origin` to the first point of the closed rectangle, or a negative
/// value when the ray misses. An origin inside the rectangle yields 0.
double ray_rect_distance(const Vec2 & origin, const Vec2 & dir, const OrientedRect & rect);

/// Distance along `dir` to where the ray leaves the region that contains `origin`.
double ray_exit_distance(const Vec2 & origin, const Vec2 & dir, const PlacedRegion & region);
double ray_exit_distance(const Vec2 & origin, const Vec2 & dir, const AxisBox & box);

Ray cast_ray(
  const Vec2 & origin, const Vec2 & direction, const ParkingLot & lot,
  std::span<const OrientedRect> vehicles, const PlacedRegion & region);

/// Intersections of segment [a, b] with the boundary of a placed region, ordered along the segment.
std::vector<Vec2> segment_region_boundary_points(const Vec2 & a, const Vec2 & b, const PlacedRegion & region);

}  // namespace avp
