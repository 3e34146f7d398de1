#include "avp/trace.hpp"

#include "avp/lot_io.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace avp
{

namespace
{

using nlohmann::json;

json pose_json(const Pose2 & p) { return json::array({p.x, p.y, p.theta}); }

Pose2 pose_from(const json & j)
{
  if (!j.is_array() || j.size() != 3) {
    throw std::runtime_error("trace: pose must be [x, y, theta]");
  }
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

json poses_json(const std::vector<Pose2> & ps)
{
  json a = json::array();
  for (const auto & p : ps) {
    a.push_back(pose_json(p));
  }
  return a;
}

std::vector<Pose2> poses_from(const json & j)
{
  std::vector<Pose2> out;
  for (const auto & p : j) {
    out.push_back(pose_from(p));
  }
  return out;
}

const char * intent_kind(IntentTag::Kind k)
{
  switch (k) {
    case IntentTag::Kind::Spot:
      return "spot";
    case IntentTag::Kind::Explore:
      return "explore";
    case IntentTag::Kind::None:
      break;
  }
  return "none";
}

IntentTag::Kind intent_kind_from(const std::string & s)
{
  if (s == "spot") {
    return IntentTag::Kind::Spot;
  }
  if (s == "explore") {
    return IntentTag::Kind::Explore;
  }
  return IntentTag::Kind::None;
}

EgoDecision::Kind decision_kind_from(const std::string & s)
{
  for (auto k : {EgoDecision::Kind::Continue, EgoDecision::Kind::Park, EgoDecision::Kind::Explore,
                 EgoDecision::Kind::Idle}) {
    if (s == to_string(k)) {
      return k;
    }
  }
  throw std::runtime_error("trace: unknown decision kind " + s);
}

Outcome outcome_from(const std::string & s)
{
  for (auto o : {Outcome::Parked, Outcome::Collision, Outcome::Timeout, Outcome::Error}) {
    if (s == to_string(o)) {
      return o;
    }
  }
  throw std::runtime_error("trace: unknown outcome " + s);
}

json region_json(const SensingRegion & r)
{
  return {
    {"shape", r.shape == SensingRegion::Shape::Disc ? "disc" : "rect"},
    {"radius", r.radius},
    {"length", r.length},
    {"width", r.width},
    {"offset", json::array({r.offset.x(), r.offset.y()})}};
}

SensingRegion region_from(const json & j)
{
  SensingRegion r;
  r.shape = j.at("shape").get<std::string>() == "disc" ? SensingRegion::Shape::Disc : SensingRegion::Shape::Rect;
  r.radius = j.at("radius").get<double>();
  r.length = j.at("length").get<double>();
  r.width = j.at("width").get<double>();
  r.offset = {j.at("offset")[0].get<double>(), j.at("offset")[1].get<double>()};
  return r;
}

json step_json(std::size_t k, const StepRecord & s)
{
  json j;
  j["type"] = "step";
  j["k"] = k;
  j["t"] = s.time;
  j["ego"] = pose_json(s.ego);
  j["agents"] = poses_json(s.agents);
  json braked = json::array();
  for (bool b : s.braked) {
    braked.push_back(b ? 1 : 0);
  }
  j["braked"] = braked;
  j["vacant"] = s.vacant;
  j["occupied"] = s.occupied;
  j["dynamic_seen"] = s.dynamic_seen;
  j["beliefs"] = s.beliefs;
  json intents = json::array();
  for (const auto & i : s.intents) {
    json spots = json::array();
    for (const auto & [spot, p] : i.spots) {
      spots.push_back(json::array({spot, p}));
    }
    intents.push_back(
      {{"vehicle", i.vehicle},
       {"spots", spots},
       {"exploration_points", poses_json(i.exploration_points)},
       {"exploration_probs", i.exploration_probs}});
  }
  j["intents"] = intents;
  json preds = json::array();
  for (const auto & p : s.predictions) {
    preds.push_back(
      {{"agent_id", p.agent_id},
       {"agent", p.agent == PredictedTrajectory::Agent::Vehicle ? "vehicle" : "pedestrian"},
       {"intent", json::array({intent_kind(p.intent.kind), p.intent.index})},
       {"probability", p.probability},
       {"length", p.length},
       {"width", p.width},
       {"radius", p.radius},
       {"poses", poses_json(p.poses)}});
  }
  j["predictions"] = preds;
  const auto & d = s.decision;
  j["decision"] = {
    {"kind", to_string(d.kind)},
    {"v", d.control.v},
    {"omega", d.control.omega},
    {"spot", d.spot},
    {"goal", pose_json(d.goal)},
    {"planner_calls", d.planner_calls}};
  j["new_plan"] = poses_json(s.new_plan);
  return j;
}

StepRecord step_from(const json & j)
{
  StepRecord s;
  s.time = j.at("t").get<double>();
  s.ego = pose_from(j.at("ego"));
  s.agents = poses_from(j.at("agents"));
  for (const auto & b : j.at("braked")) {
    s.braked.push_back(b.get<int>() != 0);
  }
  s.vacant = j.at("vacant").get<std::vector<int>>();
  s.occupied = j.at("occupied").get<std::vector<int>>();
  s.dynamic_seen = j.at("dynamic_seen").get<std::vector<int>>();
  s.beliefs = j.at("beliefs").get<std::vector<double>>();
  for (const auto & i : j.at("intents")) {
    LoggedIntent li;
    li.vehicle = i.at("vehicle").get<int>();
    for (const auto & e : i.at("spots")) {
      li.spots.emplace_back(e[0].get<int>(), e[1].get<double>());
    }
    li.exploration_points = poses_from(i.at("exploration_points"));
    li.exploration_probs = i.at("exploration_probs").get<std::vector<double>>();
    s.intents.push_back(std::move(li));
  }
  for (const auto & p : j.at("predictions")) {
    PredictedTrajectory t;
    t.agent_id = p.at("agent_id").get<int>();
    t.agent = p.at("agent").get<std::string>() == "vehicle" ? PredictedTrajectory::Agent::Vehicle
                                                             : PredictedTrajectory::Agent::Pedestrian;
    t.intent.kind = intent_kind_from(p.at("intent")[0].get<std::string>());
    t.intent.index = p.at("intent")[1].get<int>();
    t.probability = p.at("probability").get<double>();
    t.length = p.at("length").get<double>();
    t.width = p.at("width").get<double>();
    t.radius = p.at("radius").get<double>();
    t.poses = poses_from(p.at("poses"));
    s.predictions.push_back(std::move(t));
  }
  const auto & d = j.at("decision");
  s.decision.kind = decision_kind_from(d.at("kind").get<std::string>());
  s.decision.control = {d.at("v").get<double>(), d.at("omega").get<double>()};
  s.decision.spot = d.at("spot").get<int>();
  s.decision.goal = pose_from(d.at("goal"));
  s.decision.planner_calls = d.at("planner_calls").get<int>();
  s.new_plan = poses_from(j.at("new_plan"));
  return s;
}

}  // namespace

void write_trace(std::ostream & out, const Scenario & sc, const SimConfig & cfg, const EpisodeLog & log)
{
  json h;
  h["type"] = "header";
  h["schema"] = kTraceSchema;
  h["seed"] = log.seed;
  h["method"] = to_string(log.method);
  h["reactive"] = log.reactive;
  h["dt"] = cfg.scenario.dt;
  h["region"] = region_json(cfg.region);
  h["n_ray"] = cfg.n_ray;
  h["lot"] = lot_to_json(sc.layout.lot);
  h["ego"] = {{"length", sc.ego.length}, {"width", sc.ego.width}};
  json statics = json::array();
  for (const auto & v : sc.static_vehicles) {
    statics.push_back({{"pose", pose_json(v.pose)}, {"length", v.length}, {"width", v.width}});
  }
  h["static_vehicles"] = statics;
  json agents = json::array();
  for (const auto & a : sc.agents) {
    const bool vehicle = a.kind == ScriptedAgent::Kind::Vehicle;
    agents.push_back(
      {{"id", a.id},
       {"kind", vehicle ? "vehicle" : "pedestrian"},
       {"length", vehicle ? a.vehicle.length : 0.0},
       {"width", vehicle ? a.vehicle.width : 0.0},
       {"radius", vehicle ? 0.0 : a.pedestrian.radius},
       {"target_spot", a.target_spot},
       {"maneuver", a.maneuver},
       {"passiveness", a.passiveness}});
  }
  h["agents"] = agents;
  out << h.dump() << '\n';

  for (std::size_t k = 0; k < log.steps.size(); ++k) {
    out << step_json(k, log.steps[k]).dump() << '\n';
  }

  json s;
  s["type"] = "summary";
  s["outcome"] = to_string(log.outcome);
  s["t_end"] = log.t_end;
  s["parked_spot"] = log.parked_spot;
  s["collision_with"] = log.collision_with;
  s["final_ego"] = pose_json(log.final_ego);
  s["final_agents"] = poses_json(log.final_agents);
  s["agent_parked_at"] = log.agent_parked_at;
  s["planning_calls"] = log.planning_calls;
  out << s.dump() << '\n';
}

TraceData read_trace(std::istream & in)
{
  TraceData d;
  std::string line;
  bool header = false;
  bool summary = false;
  int line_no = 0;
  try {
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) {
        continue;
      }
      const json j = json::parse(line);
      const auto type = j.at("type").get<std::string>();
      if (!header) {
        if (type != "header" || j.value("schema", "") != kTraceSchema) {
          throw std::runtime_error(std::string("not an ") + kTraceSchema + " trace");
        }
        header = true;
        d.log.seed = j.at("seed").get<std::uint64_t>();
        d.log.method = parse_method(j.at("method").get<std::string>());
        d.log.reactive = j.at("reactive").get<bool>();
        d.dt = j.at("dt").get<double>();
        d.region = region_from(j.at("region"));
        d.n_ray = j.at("n_ray").get<int>();
        d.lot = lot_from_json(j.at("lot"));
        d.ego_length = j.at("ego").at("length").get<double>();
        d.ego_width = j.at("ego").at("width").get<double>();
        for (const auto & v : j.at("static_vehicles")) {
          VehicleState s;
          s.pose = pose_from(v.at("pose"));
          s.length = v.at("length").get<double>();
          s.width = v.at("width").get<double>();
          d.static_vehicles.push_back(s);
        }
        for (const auto & a : j.at("agents")) {
          TraceAgent t;
          t.id = a.at("id").get<int>();
          t.vehicle = a.at("kind").get<std::string>() == "vehicle";
          t.length = a.at("length").get<double>();
          t.width = a.at("width").get<double>();
          t.radius = a.at("radius").get<double>();
          t.target_spot = a.at("target_spot").get<int>();
          t.maneuver = a.at("maneuver").get<int>();
          t.passiveness = a.at("passiveness").get<int>();
          d.log.agent_ids.push_back(t.id);
          d.log.agent_is_vehicle.push_back(t.vehicle);
          d.log.agent_targets.push_back(t.target_spot);
          d.agents.push_back(t);
        }
      } else if (type == "step") {
        if (summary) {
          throw std::runtime_error("step after summary");
        }
        d.log.steps.push_back(step_from(j));
      } else if (type == "summary") {
        summary = true;
        d.log.outcome = outcome_from(j.at("outcome").get<std::string>());
        d.log.t_end = j.at("t_end").get<double>();
        d.log.parked_spot = j.at("parked_spot").get<int>();
        d.log.collision_with = j.at("collision_with").get<std::string>();
        d.log.final_ego = pose_from(j.at("final_ego"));
        d.log.final_agents = poses_from(j.at("final_agents"));
        d.log.agent_parked_at = j.at("agent_parked_at").get<std::vector<double>>();
        d.log.planning_calls = j.at("planning_calls").get<int>();
      } else {
        throw std::runtime_error("unknown record type " + type);
      }
    }
  } catch (const json::exception & e) {
    throw std::runtime_error("trace line " + std::to_string(line_no) + ": " + e.what());
  } catch (const std::invalid_argument & e) {
    throw std::runtime_error("trace line " + std::to_string(line_no) + ": " + e.what());
  }
  if (!header) {
    throw std::runtime_error("trace: empty");
  }
  if (!summary) {
    throw std::runtime_error("trace: missing summary record");
  }
  return d;
}

TraceData load_trace(const std::string & path)
{
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open trace file: " + path);
  }
  return read_trace(in);
}

}  // namespace avp
