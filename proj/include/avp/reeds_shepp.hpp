#pragma once

#include "avp/geometry.hpp"

#include <vector>

namespace avp
{

struct RsSegment
{
  enum class Type : char { Left = 'L', Straight = 'S', Right = 'R' };

  Type type{Type::Straight};
  /// Signed length in units of the turning radius; negative means reverse.
  double length{0.0};
};

struct RsPath
{
  std::vector<RsSegment> segments;
  double radius{1.0};

  /// Total length in meters.
  double length() const;
  /// Pose after travelling `s` meters along the path from `start`.
  Pose2 interpolate(const Pose2 & start, double s) const;
  Pose2 end(const Pose2 & start) const { return interpolate(start, length()); }
};

/// Every admissible word of the 48-family Reeds-Shepp construction (empty segments dropped).
std::vector<RsPath> reeds_shepp_candidates(const Pose2 & start, const Pose2 & goal, double radius);

/// Shortest admissible path; throws if none was found (cannot happen for radius > 0).
RsPath reeds_shepp_shortest(const Pose2 & start, const Pose2 & goal, double radius);

double reeds_shepp_distance(const Pose2 & start, const Pose2 & goal, double radius);

}  // namespace avp
