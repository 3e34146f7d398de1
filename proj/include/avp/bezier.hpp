#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

namespace avp
{

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendreRule
{
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point rule computed by Newton iteration on the Legendre polynomial; cached for n = 32.
GaussLegendreRule gauss_legendre(int n);
const GaussLegendreRule & gauss_legendre_32();

template <typename Scalar>
struct CubicBezier
{
  using Point = Eigen::Matrix<Scalar, 2, 1>;

  std::array<Point, 4> p;

  Point operator()(Scalar t) const
  {
    const Scalar u = Scalar(1) - t;
    return u * u * u * p[0] + Scalar(3) * u * u * t * p[1] + Scalar(3) * u * t * t * p[2] + t * t * t * p[3];
  }

  Point derivative(Scalar t) const
  {
    const Scalar u = Scalar(1) - t;
    return Scalar(3) * u * u * (p[1] - p[0]) + Scalar(6) * u * t * (p[2] - p[1]) + Scalar(3) * t * t * (p[3] - p[2]);
  }

  Point second_derivative(Scalar t) const
  {
    return Scalar(6) * (Scalar(1) - t) * (p[2] - Scalar(2) * p[1] + p[0]) + Scalar(6) * t * (p[3] - Scalar(2) * p[2] + p[1]);
  }

  Scalar speed(Scalar t) const { return derivative(t).norm(); }

  /// Arc length between parameters a and b with the 32-point rule.
  Scalar length(Scalar a, Scalar b) const
  {
    const auto & rule = gauss_legendre_32();
    const Scalar half = Scalar(0.5) * (b - a);
    const Scalar mid = Scalar(0.5) * (b + a);
    Scalar sum(0);
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      sum += Scalar(rule.weights[i]) * speed(mid + half * Scalar(rule.nodes[i]));
    }
    return sum * half;
  }

  /// Tangent angle at t. Falls back to the second derivative, then the chord, where the first
  /// derivative vanishes; returns `fallback` for a fully degenerate curve.
  Scalar tangent_angle(Scalar t, Scalar fallback) const
  {
    using std::atan2;
    Point d = derivative(t);
    if (d.norm() > Scalar(1e-12)) {
      return atan2(d.y(), d.x());
    }
    // Direction of travel near a cusp: sign of the second derivative flips past t = 1.
    d = second_derivative(t);
    if (t >= Scalar(1)) {
      d = -d;
    }
    if (d.norm() > Scalar(1e-12)) {
      return atan2(d.y(), d.x());
    }
    d = p[3] - p[0];
    if (d.norm() > Scalar(1e-12)) {
      return atan2(d.y(), d.x());
    }
    return fallback;
  }
};

/// Monotone arc-length to parameter map: cumulative lengths at `intervals` uniform parameter
/// samples, refined by Newton iteration inside the bracketing interval.
template <typename Scalar>
class ArcLengthTable
{
public:
  explicit ArcLengthTable(const CubicBezier<Scalar> & curve, int intervals = 256)
  : curve_(curve), cumulative_(intervals + 1, Scalar(0))
  {
    for (int k = 0; k < intervals; ++k) {
      const Scalar a = Scalar(k) / Scalar(intervals);
      const Scalar b = Scalar(k + 1) / Scalar(intervals);
      cumulative_[k + 1] = cumulative_[k] + curve.length(a, b);
    }
  }

  Scalar total() const { return cumulative_.back(); }

  /// Parameter t with arc length s from the start; clamps to [0, 1].
  Scalar parameter(Scalar s) const
  {
    const int n = static_cast<int>(cumulative_.size()) - 1;
    if (s <= Scalar(0)) {
      return Scalar(0);
    }
    if (s >= total()) {
      return Scalar(1);
    }
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), s);
    const int k = std::clamp(static_cast<int>(it - cumulative_.begin()) - 1, 0, n - 1);
    const Scalar lo = Scalar(k) / Scalar(n);
    const Scalar hi = Scalar(k + 1) / Scalar(n);
    const Scalar seg = cumulative_[k + 1] - cumulative_[k];
    if (seg <= Scalar(0)) {
      return lo;
    }
    const Scalar target = s - cumulative_[k];
    Scalar t = lo + (hi - lo) * target / seg;
    const Scalar tol = Scalar(1e-10) * std::max(total(), Scalar(1));
    for (int iter = 0; iter < 20; ++iter) {
      const Scalar err = curve_.length(lo, t) - target;
      using std::abs;
      if (abs(err) <= tol) {
        break;
      }
      const Scalar v = curve_.speed(t);
      Scalar next = v > Scalar(1e-12) ? t - err / v : Scalar(0.5) * (lo + hi);
      // Keep the iterate inside the bracket; bisect toward the root if Newton overshoots.
      if (next <= lo || next >= hi) {
        next = err > Scalar(0) ? Scalar(0.5) * (lo + t) : Scalar(0.5) * (t + hi);
      }
      t = next;
    }
    return t;
  }

private:
  CubicBezier<Scalar> curve_;
  std::vector<Scalar> cumulative_;
};

}  // namespace avp
