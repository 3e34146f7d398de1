#include "avp/trajectory.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace avp
{

GaussLegendreRule gauss_legendre(int n)
{
  if (n < 1) {
    throw std::invalid_argument("gauss_legendre: n must be positive");
  }
  GaussLegendreRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) {
        break;
      }
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  return rule;
}

const GaussLegendreRule & gauss_legendre_32()
{
  static const GaussLegendreRule rule = gauss_legendre(32);
  return rule;
}

CubicBezier<double> bezier_control_points(
  const Pose2 & state, double v_bar, const Pose2 & goal, double zeta, BezierStartTangent start_tangent)
{
  if (zeta < 0.0 || v_bar < 0.0) {
    throw std::invalid_argument("bezier_control_points: zeta and v_bar must be non-negative");
  }
  const double reach = zeta * v_bar;
  const double start_dir =
    start_tangent == BezierStartTangent::AsPaper ? state.theta + std::numbers::pi : state.theta;
  CubicBezier<double> c;
  c.p[0] = state.position();
  c.p[3] = goal.position();
  c.p[1] = c.p[0] + reach * unit_vector(start_dir);
  c.p[2] = c.p[3] + reach * unit_vector(goal.theta + std::numbers::pi);
  return c;
}

int horizon_steps(double horizon, double dt)
{
  if (!(dt > 0.0)) {
    throw std::invalid_argument("horizon_steps: dt must be positive");
  }
  return static_cast<int>(std::floor(horizon / dt + 1e-9));
}

std::vector<Pose2> bezier_predict(
  const CubicBezier<double> & curve, double goal_heading, double start_heading, double v_bar, double dt,
  double t_pred, double t_total)
{
  if (!(dt > 0.0)) {
    throw std::invalid_argument("bezier_predict: dt must be positive");
  }
  if (t_total < t_pred) {
    throw std::invalid_argument("bezier_predict: t_total shorter than t_pred");
  }
  const int n_pred = horizon_steps(t_pred, dt);
  const int n_total = horizon_steps(t_total, dt);
  std::vector<Pose2> out;
  out.reserve(n_total);

  const Pose2 start{curve.p[0].x(), curve.p[0].y(), normalize_angle(start_heading)};
  if (v_bar <= 0.0) {
    out.assign(n_total, start);
    return out;
  }

  const ArcLengthTable<double> table(curve);
  const double total = table.total();
  const Pose2 goal{curve.p[3].x(), curve.p[3].y(), normalize_angle(goal_heading)};
  bool exhausted = false;
  for (int k = 1; k <= n_pred; ++k) {
    const double s = k * v_bar * dt;
    if (s >= total) {
      out.push_back(goal);
      exhausted = true;
      continue;
    }
    const double t = table.parameter(s);
    const Vec2 p = curve(t);
    out.push_back({p.x(), p.y(), normalize_angle(curve.tangent_angle(t, start_heading))});
  }
  const Pose2 last = out.empty() ? start : out.back();
  const double fill_speed = exhausted ? 0.0 : v_bar;
  for (int k = n_pred + 1; k <= n_total; ++k) {
    const double dist = (k - n_pred) * fill_speed * dt;
    out.push_back({last.x + dist * std::cos(last.theta), last.y + dist * std::sin(last.theta), last.theta});
  }
  return out;
}

std::vector<Pose2> cv_predict(const Pose2 & pose, double v_bar, double dt, double horizon)
{
  const int n = horizon_steps(horizon, dt);
  std::vector<Pose2> out;
  out.reserve(n);
  const double c = std::cos(pose.theta);
  const double s = std::sin(pose.theta);
  for (int k = 1; k <= n; ++k) {
    const double dist = k * v_bar * dt;
    out.push_back({pose.x + dist * c, pose.y + dist * s, pose.theta});
  }
  return out;
}

std::vector<Vec2> pedestrian_predict(const Vec2 & p_now, const Vec2 & p_prev, double dt, double horizon)
{
  const int n = horizon_steps(horizon, dt);
  const Vec2 step = p_now - p_prev;
  std::vector<Vec2> out;
  out.reserve(n);
  for (int k = 1; k <= n; ++k) {
    out.push_back(p_now + k * step);
  }
  return out;
}

double mean_speed(const std::vector<Pose2> & history, double dt)
{
  if (history.size() < 2) {
    return 0.0;
  }
  double sum = 0.0;
  for (std::size_t i = 1; i < history.size(); ++i) {
    sum += (history[i].position() - history[i - 1].position()).norm() / dt;
  }
  return sum / static_cast<double>(history.size() - 1);
}

double current_signed_speed(const std::vector<Pose2> & history, double dt)
{
  if (history.size() < 2) {
    return 0.0;
  }
  const Pose2 & now = history.back();
  const Vec2 step = now.position() - history[history.size() - 2].position();
  return step.dot(now.heading()) / dt;
}

}  // namespace avp
