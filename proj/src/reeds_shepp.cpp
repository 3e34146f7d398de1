#include "avp/reeds_shepp.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace avp
{

namespace
{

constexpr double pi = std::numbers::pi;
constexpr double kZero = 10.0 * std::numeric_limits<double>::epsilon();

using T = RsSegment::Type;
constexpr T L = T::Left;
constexpr T R = T::Right;
constexpr T S = T::Straight;

double mod2pi(double x)
{
  double v = std::fmod(x, 2.0 * pi);
  if (v < -pi) {
    v += 2.0 * pi;
  } else if (v > pi) {
    v -= 2.0 * pi;
  }
  return v;
}

void polar(double x, double y, double & r, double & theta)
{
  r = std::sqrt(x * x + y * y);
  theta = std::atan2(y, x);
}

void tau_omega(double u, double v, double xi, double eta, double phi, double & tau, double & omega)
{
  const double delta = mod2pi(u - v);
  const double a = std::sin(u) - std::sin(delta);
  const double b = std::cos(u) - std::cos(delta) - 1.0;
  const double t1 = std::atan2(eta * a - xi * b, xi * a + eta * b);
  const double t2 = 2.0 * (std::cos(delta) - std::cos(v) - std::cos(u)) + 3.0;
  tau = t2 < 0.0 ? mod2pi(t1 + pi) : mod2pi(t1);
  omega = mod2pi(tau - u + v - phi);
}

bool lp_sp_lp(double x, double y, double phi, double & t, double & u, double & v)
{
  polar(x - std::sin(phi), y - 1.0 + std::cos(phi), u, t);
  if (t >= -kZero) {
    v = mod2pi(phi - t);
    if (v >= -kZero) {
      return true;
    }
  }
  return false;
}

bool lp_sp_rp(double x, double y, double phi, double & t, double & u, double & v)
{
  double t1 = 0.0;
  double u1 = 0.0;
  polar(x + std::sin(phi), y - 1.0 - std::cos(phi), u1, t1);
  u1 = u1 * u1;
  if (u1 >= 4.0) {
    u = std::sqrt(u1 - 4.0);
    const double theta = std::atan2(2.0, u);
    t = mod2pi(t1 + theta);
    v = mod2pi(t - phi);
    return t >= -kZero && v >= -kZero;
  }
  return false;
}

bool lp_rm_l(double x, double y, double phi, double & t, double & u, double & v)
{
  const double xi = x - std::sin(phi);
  const double eta = y - 1.0 + std::cos(phi);
  double u1 = 0.0;
  double theta = 0.0;
  polar(xi, eta, u1, theta);
  if (u1 <= 4.0) {
    u = -2.0 * std::asin(0.25 * u1);
    t = mod2pi(theta + 0.5 * u + pi);
    v = mod2pi(phi - t + u);
    return t >= -kZero && u <= kZero;
  }
  return false;
}

bool lp_rup_lum_rm(double x, double y, double phi, double & t, double & u, double & v)
{
  const double xi = x + std::sin(phi);
  const double eta = y - 1.0 - std::cos(phi);
  const double rho = 0.25 * (2.0 + std::sqrt(xi * xi + eta * eta));
  if (rho <= 1.0) {
    u = std::acos(rho);
    tau_omega(u, -u, xi, eta, phi, t, v);
    return t >= -kZero && v <= kZero;
  }
  return false;
}

bool lp_rum_lum_rp(double x, double y, double phi, double & t, double & u, double & v)
{
  const double xi = x + std::sin(phi);
  const double eta = y - 1.0 - std::cos(phi);
  const double rho = (20.0 - xi * xi - eta * eta) / 16.0;
  if (rho >= 0.0 && rho <= 1.0) {
    u = -std::acos(rho);
    if (u >= -0.5 * pi) {
      tau_omega(u, u, xi, eta, phi, t, v);
      return t >= -kZero && v >= -kZero;
    }
  }
  return false;
}

bool lp_rm_sm_lm(double x, double y, double phi, double & t, double & u, double & v)
{
  const double xi = x - std::sin(phi);
  const double eta = y - 1.0 + std::cos(phi);
  double rho = 0.0;
  double theta = 0.0;
  polar(xi, eta, rho, theta);
  if (rho >= 2.0) {
    const double r = std::sqrt(rho * rho - 4.0);
    u = 2.0 - r;
    t = mod2pi(theta + std::atan2(r, -2.0));
    v = mod2pi(phi - 0.5 * pi - t);
    return t >= -kZero && u <= kZero && v <= kZero;
  }
  return false;
}

bool lp_rm_sm_rm(double x, double y, double phi, double & t, double & u, double & v)
{
  const double xi = x + std::sin(phi);
  const double eta = y - 1.0 - std::cos(phi);
  double rho = 0.0;
  double theta = 0.0;
  polar(-eta, xi, rho, theta);
  if (rho >= 2.0) {
    t = theta;
    u = 2.0 - rho;
    v = mod2pi(t + 0.5 * pi - phi);
    return t >= -kZero && u <= kZero && v <= kZero;
  }
  return false;
}

bool lp_rm_s_lm_rp(double x, double y, double phi, double & t, double & u, double & v)
{
  const double xi = x + std::sin(phi);
  const double eta = y - 1.0 - std::cos(phi);
  double rho = 0.0;
  double theta = 0.0;
  polar(xi, eta, rho, theta);
  if (rho >= 2.0) {
    u = 4.0 - std::sqrt(rho * rho - 4.0);
    if (u <= kZero) {
      t = mod2pi(std::atan2((4.0 - u) * xi - 2.0 * eta, -2.0 * xi + (u - 4.0) * eta));
      v = mod2pi(t - phi);
      return t >= -kZero && v >= -kZero;
    }
  }
  return false;
}

// Collects candidate words scaled to one radius.
struct Collector
{
  std::vector<RsPath> * out;
  double radius;
};

T flip(T t) { return t == L ? R : (t == R ? L : S); }

// Applies the four symmetric variants (identity, time flip, reflection, both) of one formula.
template <typename Formula>
void symmetric(
  Collector & c, Formula f, double x, double y, double phi, std::initializer_list<T> word,
  double (*pattern)(int, double, double, double), int n_seg)
{
  double t = 0.0, u = 0.0, v = 0.0;
  const double xs[4] = {x, -x, x, -x};
  const double ys[4] = {y, y, -y, -y};
  const double ps[4] = {phi, -phi, -phi, phi};
  for (int k = 0; k < 4; ++k) {
    if (!f(xs[k], ys[k], ps[k], t, u, v)) {
      continue;
    }
    const double sign = (k == 1 || k == 3) ? -1.0 : 1.0;
    std::vector<T> w(word);
    if (k >= 2) {
      for (auto & s : w) {
        s = flip(s);
      }
    }
    RsPath p;
    p.radius = c.radius;
    for (int i = 0; i < n_seg; ++i) {
      const double len = sign * pattern(i, t, u, v);
      if (std::abs(len) > 1e-12) {
        p.segments.push_back({w[i], len});
      }
    }
    c.out->push_back(std::move(p));
  }
}

double tuv(int i, double t, double u, double v) { return i == 0 ? t : (i == 1 ? u : v); }
double vut(int i, double t, double u, double v) { return i == 0 ? v : (i == 1 ? u : t); }
double t_u_mu_v(int i, double t, double u, double v) { return i == 0 ? t : (i == 1 ? u : (i == 2 ? -u : v)); }
double t_u_u_v(int i, double t, double u, double v) { return i == 0 ? t : (i == 1 ? u : (i == 2 ? u : v)); }
double t_h_u_v(int i, double t, double u, double v) { return i == 0 ? t : (i == 1 ? -0.5 * pi : (i == 2 ? u : v)); }
double v_u_h_t(int i, double t, double u, double v) { return i == 0 ? v : (i == 1 ? u : (i == 2 ? -0.5 * pi : t)); }
double t_h_u_h_v(int i, double t, double u, double v)
{
  switch (i) {
    case 0: return t;
    case 2: return u;
    case 4: return v;
    default: return -0.5 * pi;
  }
}

}  // namespace

double RsPath::length() const
{
  double sum = 0.0;
  for (const auto & s : segments) {
    sum += std::abs(s.length);
  }
  return sum * radius;
}

Pose2 RsPath::interpolate(const Pose2 & start, double s) const
{
  double x = 0.0, y = 0.0, phi = 0.0;
  double remaining = std::max(0.0, s) / radius;
  for (const auto & seg : segments) {
    if (remaining <= 0.0) {
      break;
    }
    const double step = std::min(remaining, std::abs(seg.length));
    const double v = seg.length < 0.0 ? -step : step;
    remaining -= step;
    switch (seg.type) {
      case T::Left:
        x += std::sin(phi + v) - std::sin(phi);
        y += -std::cos(phi + v) + std::cos(phi);
        phi += v;
        break;
      case T::Right:
        x += -std::sin(phi - v) + std::sin(phi);
        y += std::cos(phi - v) - std::cos(phi);
        phi -= v;
        break;
      case T::Straight:
        x += v * std::cos(phi);
        y += v * std::sin(phi);
        break;
    }
  }
  const double c = std::cos(start.theta);
  const double sn = std::sin(start.theta);
  return {start.x + radius * (c * x - sn * y), start.y + radius * (sn * x + c * y), normalize_angle(start.theta + phi)};
}

std::vector<RsPath> reeds_shepp_candidates(const Pose2 & start, const Pose2 & goal, double radius)
{
  if (!(radius > 0.0)) {
    throw std::invalid_argument("reeds_shepp: radius must be positive");
  }
  const double dx = goal.x - start.x;
  const double dy = goal.y - start.y;
  const double c = std::cos(start.theta);
  const double s = std::sin(start.theta);
  const double x = (c * dx + s * dy) / radius;
  const double y = (-s * dx + c * dy) / radius;
  const double phi = normalize_angle(goal.theta - start.theta);
  // Coordinates of the reversed problem, used by the "backwards" words.
  const double xb = x * std::cos(phi) + y * std::sin(phi);
  const double yb = x * std::sin(phi) - y * std::cos(phi);

  std::vector<RsPath> out;
  Collector col{&out, radius};

  // CSC
  symmetric(col, lp_sp_lp, x, y, phi, {L, S, L}, tuv, 3);
  symmetric(col, lp_sp_rp, x, y, phi, {L, S, R}, tuv, 3);
  // CCC
  symmetric(col, lp_rm_l, x, y, phi, {L, R, L}, tuv, 3);
  symmetric(col, lp_rm_l, xb, yb, phi, {L, R, L}, vut, 3);
  // CCCC
  symmetric(col, lp_rup_lum_rm, x, y, phi, {L, R, L, R}, t_u_mu_v, 4);
  symmetric(col, lp_rum_lum_rp, x, y, phi, {L, R, L, R}, t_u_u_v, 4);
  // CCSC
  symmetric(col, lp_rm_sm_lm, x, y, phi, {L, R, S, L}, t_h_u_v, 4);
  symmetric(col, lp_rm_sm_rm, x, y, phi, {L, R, S, R}, t_h_u_v, 4);
  symmetric(col, lp_rm_sm_lm, xb, yb, phi, {L, S, R, L}, v_u_h_t, 4);
  symmetric(col, lp_rm_sm_rm, xb, yb, phi, {R, S, R, L}, v_u_h_t, 4);
  // CCSCC
  symmetric(col, lp_rm_s_lm_rp, x, y, phi, {L, R, S, L, R}, t_h_u_h_v, 5);
  return out;
}

RsPath reeds_shepp_shortest(const Pose2 & start, const Pose2 & goal, double radius)
{
  auto candidates = reeds_shepp_candidates(start, goal, radius);
  if (candidates.empty()) {
    throw std::runtime_error("reeds_shepp: no admissible path");
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < candidates.size(); ++i) {
    if (candidates[i].length() < candidates[best].length() - 1e-12) {
      best = i;
    }
  }
  return candidates[best];
}

double reeds_shepp_distance(const Pose2 & start, const Pose2 & goal, double radius)
{
  return reeds_shepp_shortest(start, goal, radius).length();
}

}  // namespace avp
