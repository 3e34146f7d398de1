#pragma once

// Reference checks written without the library's geometry routines, for cross-checking it.

#include "avp/geometry.hpp"

#include <array>
#include <cmath>

namespace oracle
{

using avp::Vec2;

inline std::array<Vec2, 4> corners(const avp::Pose2 & p, double length, double width)
{
  const double c = std::cos(p.theta);
  const double s = std::sin(p.theta);
  const Vec2 f{0.5 * length * c, 0.5 * length * s};
  const Vec2 l{-0.5 * width * s, 0.5 * width * c};
  const Vec2 o{p.x, p.y};
  return {o + f + l, o - f + l, o - f - l, o + f - l};
}

inline std::array<Vec2, 4> corners(const avp::OrientedRect & r) { return corners(r.pose(), r.length, r.width); }

inline double cross(const Vec2 & a, const Vec2 & b, const Vec2 & c)
{
  return (b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x());
}

/// Point inside a convex counter-clockwise quad (boundary included).
inline bool inside(const std::array<Vec2, 4> & q, const Vec2 & p, double tol = 1e-9)
{
  for (int i = 0; i < 4; ++i) {
    const Vec2 & a = q[i];
    const Vec2 & b = q[(i + 1) % 4];
    if (cross(a, b, p) < -tol * (b - a).norm()) {
      return false;
    }
  }
  return true;
}

inline bool on_segment(const Vec2 & a, const Vec2 & b, const Vec2 & p)
{
  return std::min(a.x(), b.x()) - 1e-12 <= p.x() && p.x() <= std::max(a.x(), b.x()) + 1e-12 &&
         std::min(a.y(), b.y()) - 1e-12 <= p.y() && p.y() <= std::max(a.y(), b.y()) + 1e-12;
}

inline bool segments_cross(const Vec2 & a, const Vec2 & b, const Vec2 & c, const Vec2 & d)
{
  const double d1 = cross(c, d, a);
  const double d2 = cross(c, d, b);
  const double d3 = cross(a, b, c);
  const double d4 = cross(a, b, d);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) {
    return true;
  }
  return (d1 == 0 && on_segment(c, d, a)) || (d2 == 0 && on_segment(c, d, b)) ||
         (d3 == 0 && on_segment(a, b, c)) || (d4 == 0 && on_segment(a, b, d));
}

/// Two convex quads share a point.
inline bool quads_overlap(const std::array<Vec2, 4> & p, const std::array<Vec2, 4> & q)
{
  for (const auto & c : p) {
    if (inside(q, c)) {
      return true;
    }
  }
  for (const auto & c : q) {
    if (inside(p, c)) {
      return true;
    }
  }
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      if (segments_cross(p[i], p[(i + 1) % 4], q[j], q[(j + 1) % 4])) {
        return true;
      }
    }
  }
  return false;
}

/// Distance from a point to a (filled) oriented rectangle.
inline double point_rect_distance(const Vec2 & p, const avp::Pose2 & pose, double length, double width)
{
  const double c = std::cos(pose.theta);
  const double s = std::sin(pose.theta);
  const double dx = p.x() - pose.x;
  const double dy = p.y() - pose.y;
  const double lx = std::abs(c * dx + s * dy) - 0.5 * length;
  const double ly = std::abs(-s * dx + c * dy) - 0.5 * width;
  return std::hypot(std::max(lx, 0.0), std::max(ly, 0.0));
}

}  // namespace oracle
