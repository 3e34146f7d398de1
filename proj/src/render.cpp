#include "avp/render.hpp"

#include "avp/sensing.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace avp
{

namespace
{

constexpr double kScale = 20.0;  // pixels per meter

std::string num(double x)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", x);
  return buf;
}

std::string points(const std::array<Vec2, 4> & c)
{
  std::string s;
  for (const auto & p : c) {
    s += num(p.x()) + "," + num(p.y()) + " ";
  }
  s.pop_back();
  return s;
}

std::string polyline(const std::vector<Vec2> & ps)
{
  std::string s;
  for (const auto & p : ps) {
    s += num(p.x()) + "," + num(p.y()) + " ";
  }
  if (!s.empty()) {
    s.pop_back();
  }
  return s;
}

int channel(const char * hex, int i)
{
  unsigned v = 0;
  std::sscanf(hex + 1 + 2 * i, "%2x", &v);
  return static_cast<int>(v);
}

}  // namespace

std::string belief_color(double b)
{
  b = std::clamp(b, 0.0, 1.0);
  char buf[8];
  int rgb[3];
  for (int i = 0; i < 3; ++i) {
    const double a = channel(kVacantColor, i);
    const double z = channel(kOccupiedColor, i);
    rgb[i] = static_cast<int>(std::lround(a + b * (z - a)));
  }
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", rgb[0], rgb[1], rgb[2]);
  return buf;
}

std::string render_frame_svg(const TraceData & trace, int frame)
{
  const auto & steps = trace.log.steps;
  if (frame < 0 || frame >= static_cast<int>(steps.size())) {
    throw std::out_of_range(
      "render: frame " + std::to_string(frame) + " outside trace of " + std::to_string(steps.size()) + " frames");
  }
  const StepRecord & s = steps[frame];
  const auto & lot = trace.lot;
  const Vec2 ext = lot.boundary.extent();

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(ext.x() * kScale) << "\" height=\""
    << num(ext.y() * kScale) << "\" viewBox=\"0 0 " << num(ext.x() * kScale) << " " << num(ext.y() * kScale)
    << "\">\n";
  o << "<g transform=\"translate(" << num(-lot.boundary.min.x() * kScale) << "," << num(lot.boundary.max.y() * kScale)
    << ") scale(" << kScale << "," << -kScale << ")\">\n";
  o << "<rect class=\"boundary\" x=\"" << num(lot.boundary.min.x()) << "\" y=\"" << num(lot.boundary.min.y())
    << "\" width=\"" << num(ext.x()) << "\" height=\"" << num(ext.y()) << "\" fill=\"#f4f4f4\" stroke=\"black\" "
    << "stroke-width=\"0.1\"/>\n";
  for (const auto & r : lot.roads) {
    o << "<polygon class=\"road\" points=\"" << points(r.rect().corners()) << "\" fill=\"#cfcfcf\"/>\n";
  }
  for (int i = 0; i < lot.n_spot(); ++i) {
    const double b = i < static_cast<int>(s.beliefs.size()) ? s.beliefs[i] : 0.0;
    o << "<polygon class=\"spot\" data-spot=\"" << i << "\" data-belief=\"" << num(b) << "\" points=\""
      << points(lot.spots[i].corners()) << "\" fill=\"" << belief_color(b)
      << "\" fill-opacity=\"0.5\" stroke=\"white\" stroke-width=\"0.05\"/>\n";
  }

  // Rays are not stored in the trace; they are recast from the logged poses.
  VehicleState ego;
  ego.pose = s.ego;
  ego.length = trace.ego_length;
  ego.width = trace.ego_width;
  if (s.decision.kind != EgoDecision::Kind::Idle || !s.vacant.empty() || !s.occupied.empty()) {
    WorldSnapshot world;
    world.time = s.time;
    world.vehicles.push_back(ego);
    world.histories.push_back({ego.pose});
    for (std::size_t i = 0; i < trace.agents.size(); ++i) {
      const auto & a = trace.agents[i];
      if (a.vehicle) {
        VehicleState v;
        v.pose = s.agents[i];
        v.length = a.length;
        v.width = a.width;
        world.vehicles.push_back(v);
        world.histories.push_back({v.pose});
      } else {
        PedestrianState p;
        p.position = s.agents[i].position();
        p.radius = a.radius;
        world.pedestrians.push_back(p);
        world.pedestrian_previous.push_back(p.position);
      }
    }
    for (const auto & v : trace.static_vehicles) {
      world.vehicles.push_back(v);
      world.histories.push_back({v.pose});
    }
    const auto obs = sense(world, lot, trace.region, trace.n_ray);
    for (const auto & r : obs.rays) {
      o << "<line class=\"ray\" x1=\"" << num(r.origin.x()) << "\" y1=\"" << num(r.origin.y()) << "\" x2=\""
        << num(r.hit_point.x()) << "\" y2=\"" << num(r.hit_point.y())
        << "\" stroke=\"#ffbf00\" stroke-opacity=\"0.3\" stroke-width=\"0.03\"/>\n";
    }
  }

  for (const auto & v : trace.static_vehicles) {
    o << "<polygon class=\"static\" points=\"" << points(v.footprint().corners()) << "\" fill=\"#555555\"/>\n";
  }
  for (std::size_t i = 0; i < trace.agents.size(); ++i) {
    const auto & a = trace.agents[i];
    if (a.vehicle) {
      const auto fp = OrientedRect::at(s.agents[i], a.length, a.width);
      o << "<polygon class=\"agent\" data-id=\"" << a.id << "\" points=\"" << points(fp.corners())
        << "\" fill=\"#1f77b4\"/>\n";
    } else {
      o << "<circle class=\"pedestrian\" cx=\"" << num(s.agents[i].x) << "\" cy=\"" << num(s.agents[i].y)
        << "\" r=\"" << num(a.radius) << "\" fill=\"#9467bd\"/>\n";
    }
  }
  for (const auto & p : s.predictions) {
    std::vector<Vec2> ps;
    for (const auto & q : p.poses) {
      ps.push_back(q.position());
    }
    o << "<polyline class=\"prediction\" points=\"" << polyline(ps) << "\" fill=\"none\" stroke=\"#ff7f0e\" "
      << "stroke-width=\"0.08\" stroke-opacity=\"" << num(std::clamp(p.probability, 0.2, 1.0)) << "\"/>\n";
  }

  // The plan in force is the latest one adopted at or before this frame, unless the ego has
  // since gone idle.
  for (int k = frame; k >= 0; --k) {
    if (steps[k].decision.kind == EgoDecision::Kind::Idle) {
      break;
    }
    if (!steps[k].new_plan.empty()) {
      std::vector<Vec2> ps;
      for (const auto & q : steps[k].new_plan) {
        ps.push_back(q.position());
      }
      o << "<polyline class=\"plan\" points=\"" << polyline(ps) << "\" fill=\"none\" stroke=\"#2ca02c\" "
        << "stroke-width=\"0.1\" stroke-dasharray=\"0.3,0.2\"/>\n";
      break;
    }
  }
  o << "<polygon class=\"ego\" points=\"" << points(ego.footprint().corners()) << "\" fill=\"#17becf\" "
    << "stroke=\"black\" stroke-width=\"0.05\"/>\n";
  o << "</g>\n";
  o << "<text x=\"8\" y=\"20\" font-family=\"monospace\" font-size=\"16\">t = " << num(s.time) << " s  "
    << to_string(s.decision.kind) << "</text>\n";
  o << "</svg>\n";
  return o.str();
}

}  // namespace avp
