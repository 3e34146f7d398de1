#include "avp/config.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <set>
#include <stdexcept>

namespace avp
{

namespace
{

using nlohmann::json;

[[noreturn]] void fail(const std::string & field, const std::string & what)
{
  throw std::invalid_argument("config: " + field + " " + what);
}

void check_keys(const json & j, const std::set<std::string> & known, const std::string & prefix)
{
  if (!j.is_object()) {
    fail(prefix.empty() ? "<root>" : prefix, "must be an object");
  }
  for (const auto & [key, value] : j.items()) {
    if (known.count(key) == 0) {
      fail(prefix + key, "is not a known field");
    }
  }
}

template <class T>
void read(const json & j, const std::string & key, T & out, const std::string & prefix = "")
{
  if (!j.contains(key)) {
    return;
  }
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception &) {
    fail(prefix + key, "has the wrong type");
  }
}

const char * tangent_name(BezierStartTangent t) { return t == BezierStartTangent::AsPaper ? "as-paper" : "forward"; }

#define AVP_PLANNER_FIELDS(X)                                                                                  \
  X(dt)                                                                                                        \
  X(xy_resolution)                                                                                             \
  X(heading_bins)                                                                                              \
  X(min_turning_radius)                                                                                        \
  X(forward_speed)                                                                                             \
  X(reverse_speed)                                                                                             \
  X(forward_steps)                                                                                             \
  X(reverse_steps)                                                                                             \
  X(steering_samples)                                                                                          \
  X(reverse_penalty)                                                                                           \
  X(switch_penalty)                                                                                            \
  X(time_penalty)                                                                                              \
  X(heading_change_penalty)                                                                                    \
  X(node_budget)                                                                                               \
  X(analytic_interval)                                                                                         \
  X(analytic_radius)                                                                                           \
  X(inflation)                                                                                                 \
  X(max_plan_duration)                                                                                         \
  X(heuristic_resolution)                                                                                      \
  X(heuristic_weight)                                                                                          \
  X(analytic_near_interval)                                                                                    \
  X(goal_xy_tolerance)                                                                                         \
  X(goal_heading_tolerance)

#define AVP_WEIGHT_FIELDS(X) X(w_d) X(w_a) X(w_v) X(w_e) X(d_max) X(v0) X(v_max)

#define AVP_NAME(f) #f,

PlannerConfig planner_from_json(const json & j, PlannerConfig p)
{
  check_keys(j, {AVP_PLANNER_FIELDS(AVP_NAME)}, "planner.");
#define AVP_READ(f) read(j, #f, p.f, "planner.");
  AVP_PLANNER_FIELDS(AVP_READ)
#undef AVP_READ
  return p;
}

json planner_to_json(const PlannerConfig & p)
{
  json j;
#define AVP_WRITE(f) j[#f] = p.f;
  AVP_PLANNER_FIELDS(AVP_WRITE)
  return j;
}

ScorerSelection scorer_from_json(const json & j)
{
  check_keys(j, {"kind", "command", "timeout", "weights"}, "scorer.");
  ScorerSelection s;
  std::string kind = "heuristic";
  read(j, "kind", kind, "scorer.");
  if (kind == "heuristic") {
    s.kind = ScorerSelection::Kind::Heuristic;
  } else if (kind == "external") {
    s.kind = ScorerSelection::Kind::External;
  } else {
    fail("scorer.kind", "must be \"heuristic\" or \"external\"");
  }
  read(j, "command", s.command, "scorer.");
  read(j, "timeout", s.timeout, "scorer.");
  if (j.contains("weights")) {
    const auto & w = j.at("weights");
    check_keys(w, {AVP_WEIGHT_FIELDS(AVP_NAME)}, "scorer.weights.");
#define AVP_READ(f) read(w, #f, s.weights.f, "scorer.weights.");
    AVP_WEIGHT_FIELDS(AVP_READ)
#undef AVP_READ
  }
  return s;
}

#undef AVP_WRITE

}  // namespace

void ExperimentConfig::validate() const
{
  auto positive = [](double v, const char * name) {
    if (!(v > 0.0)) {
      fail(name, "must be positive");
    }
  };
  auto unit = [](double v, const char * name) {
    if (!(v >= 0.0 && v <= 1.0)) {
      fail(name, "must lie in [0, 1]");
    }
  };
  if (methods.empty()) {
    fail("method", "must name at least one method");
  }
  if (episodes < 1) {
    fail("episodes", "must be at least 1");
  }
  positive(t_f, "t_f");
  positive(sensing_radius, "sensing_radius");
  if (n_ray < 1) {
    fail("n_ray", "must be at least 1");
  }
  positive(t_hist, "t_hist");
  positive(l_def, "l_def");
  positive(w_def, "w_def");
  unit(beta, "beta");
  unit(mu, "mu");
  unit(delta, "delta");
  if (!(zeta >= 0.0)) {
    fail("zeta", "must be non-negative");
  }
  positive(dt, "dt");
  positive(t_pred, "t_pred");
  positive(t_plan, "t_plan");
  if (n_dynamic < 0 || n_dynamic > 2) {
    fail("n_dynamic", "must be 0, 1 or 2");
  }
  if (passiveness_min < 0 || passiveness_max < passiveness_min) {
    fail("passiveness_min", "must satisfy 0 <= passiveness_min <= passiveness_max");
  }
  if (n_pedestrians < 0) {
    fail("n_pedestrians", "must be non-negative");
  }
  if (max_candidates < 1) {
    fail("max_candidates", "must be at least 1");
  }
  if (workers < 0) {
    fail("workers", "must be non-negative");
  }
  if (scorer.kind == ScorerSelection::Kind::External && scorer.command.empty()) {
    fail("scorer.command", "is required for the external scorer");
  }
  positive(scorer.timeout, "scorer.timeout");
  positive(scorer.weights.d_max, "scorer.weights.d_max");
  positive(scorer.weights.v0, "scorer.weights.v0");
  positive(scorer.weights.v_max, "scorer.weights.v_max");
  planner.validate();
}

ScenarioConfig ExperimentConfig::scenario_config(std::uint64_t s, bool react) const
{
  ScenarioConfig c;
  c.seed = s;
  c.reactive = react;
  c.n_dynamic = n_dynamic;
  c.passiveness_min = passiveness_min;
  c.passiveness_max = passiveness_max;
  c.t_f = t_f;
  c.t_hist = t_hist;
  c.dt = dt;
  c.n_pedestrians = n_pedestrians;
  return c;
}

SimConfig ExperimentConfig::sim_config(Method method, std::uint64_t s, bool react) const
{
  SimConfig c;
  c.method = method;
  c.scenario = scenario_config(s, react);
  c.region = SensingRegion::disc(sensing_radius);
  c.n_ray = n_ray;
  c.intention.beta = beta;
  c.intention.l_def = l_def;
  c.intention.w_def = w_def;
  c.intention.t_hist = t_hist;
  c.intention.dt = dt;
  c.scorer_weights = scorer.weights;
  c.prediction.method = trajectory_method(method);
  c.prediction.mu = mu;
  c.prediction.zeta = zeta;
  c.prediction.dt = dt;
  c.prediction.t_pred = t_pred;
  c.prediction.t_plan = t_plan;
  c.prediction.start_tangent = start_tangent;
  c.prediction.planner.dt = dt;
  c.policy.delta = delta;
  c.policy.beta = beta;
  c.policy.max_candidates = max_candidates;
  c.policy.planner = planner;
  c.policy.planner.dt = dt;
  return c;
}

std::unique_ptr<IntentionScorer> ExperimentConfig::make_scorer() const
{
  if (scorer.kind == ScorerSelection::Kind::External) {
    return std::make_unique<ExternalScorer>(scorer.command, scorer.timeout, scorer.weights);
  }
  return nullptr;
}

ExperimentConfig config_from_json(const json & j)
{
  check_keys(
    j,
    {"method", "episodes", "seed", "reactive", "both_modes", "t_f", "sensing_radius", "n_ray", "t_hist", "l_def",
     "w_def", "beta", "mu", "zeta", "delta", "dt", "t_pred", "t_plan", "bezier_start_tangent", "n_dynamic",
     "passiveness_min", "passiveness_max", "n_pedestrians", "max_candidates", "planner", "scorer", "out", "workers"},
    "");
  ExperimentConfig c;
  if (j.contains("method")) {
    const auto & m = j.at("method");
    std::vector<std::string> names;
    if (m.is_string()) {
      names.push_back(m.get<std::string>());
    } else if (m.is_array()) {
      for (const auto & x : m) {
        if (!x.is_string()) {
          fail("method", "entries must be strings");
        }
        names.push_back(x.get<std::string>());
      }
    } else {
      fail("method", "must be a string or a list of strings");
    }
    c.methods.clear();
    for (const auto & n : names) {
      try {
        c.methods.push_back(parse_method(n));
      } catch (const std::invalid_argument &) {
        fail("method", "has unknown value \"" + n + "\"");
      }
    }
  }
  read(j, "episodes", c.episodes);
  read(j, "seed", c.seed);
  read(j, "reactive", c.reactive);
  read(j, "both_modes", c.both_modes);
  read(j, "t_f", c.t_f);
  read(j, "sensing_radius", c.sensing_radius);
  read(j, "n_ray", c.n_ray);
  read(j, "t_hist", c.t_hist);
  read(j, "l_def", c.l_def);
  read(j, "w_def", c.w_def);
  read(j, "beta", c.beta);
  read(j, "mu", c.mu);
  read(j, "zeta", c.zeta);
  read(j, "delta", c.delta);
  read(j, "dt", c.dt);
  read(j, "t_pred", c.t_pred);
  read(j, "t_plan", c.t_plan);
  if (j.contains("bezier_start_tangent")) {
    std::string t;
    read(j, "bezier_start_tangent", t);
    if (t == "as-paper") {
      c.start_tangent = BezierStartTangent::AsPaper;
    } else if (t == "forward") {
      c.start_tangent = BezierStartTangent::Forward;
    } else {
      fail("bezier_start_tangent", "must be \"as-paper\" or \"forward\"");
    }
  }
  read(j, "n_dynamic", c.n_dynamic);
  read(j, "passiveness_min", c.passiveness_min);
  read(j, "passiveness_max", c.passiveness_max);
  read(j, "n_pedestrians", c.n_pedestrians);
  read(j, "max_candidates", c.max_candidates);
  if (j.contains("planner")) {
    c.planner = planner_from_json(j.at("planner"), c.planner);
  }
  if (j.contains("scorer")) {
    c.scorer = scorer_from_json(j.at("scorer"));
  }
  read(j, "out", c.out);
  read(j, "workers", c.workers);
  c.validate();
  return c;
}

json config_to_json(const ExperimentConfig & c)
{
  json j;
  json methods = json::array();
  for (auto m : c.methods) {
    methods.push_back(to_string(m));
  }
  j["method"] = methods;
  j["episodes"] = c.episodes;
  j["seed"] = c.seed;
  j["reactive"] = c.reactive;
  j["both_modes"] = c.both_modes;
  j["t_f"] = c.t_f;
  j["sensing_radius"] = c.sensing_radius;
  j["n_ray"] = c.n_ray;
  j["t_hist"] = c.t_hist;
  j["l_def"] = c.l_def;
  j["w_def"] = c.w_def;
  j["beta"] = c.beta;
  j["mu"] = c.mu;
  j["zeta"] = c.zeta;
  j["delta"] = c.delta;
  j["dt"] = c.dt;
  j["t_pred"] = c.t_pred;
  j["t_plan"] = c.t_plan;
  j["bezier_start_tangent"] = tangent_name(c.start_tangent);
  j["n_dynamic"] = c.n_dynamic;
  j["passiveness_min"] = c.passiveness_min;
  j["passiveness_max"] = c.passiveness_max;
  j["n_pedestrians"] = c.n_pedestrians;
  j["max_candidates"] = c.max_candidates;
  j["planner"] = planner_to_json(c.planner);
  json w;
#define AVP_WRITE(f) w[#f] = c.scorer.weights.f;
  AVP_WEIGHT_FIELDS(AVP_WRITE)
#undef AVP_WRITE
  j["scorer"] = {
    {"kind", c.scorer.kind == ScorerSelection::Kind::External ? "external" : "heuristic"},
    {"command", c.scorer.command},
    {"timeout", c.scorer.timeout},
    {"weights", w}};
  j["out"] = c.out;
  j["workers"] = c.workers;
  return j;
}

ExperimentConfig load_config(const std::string & path)
{
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open config file: " + path);
  }
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error & e) {
    throw std::invalid_argument("config: " + path + " is not valid JSON: " + e.what());
  }
  return config_from_json(j);
}

}  // namespace avp
