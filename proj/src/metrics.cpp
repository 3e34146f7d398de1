#include "avp/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <stdexcept>

namespace avp
{

DisplacementError min_ade_fde(std::span<const std::vector<Vec2>> predictions, std::span<const Vec2> truth)
{
  if (predictions.empty()) {
    throw std::invalid_argument("min_ade_fde: empty prediction set");
  }
  DisplacementError best{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  bool any = false;
  for (const auto & pred : predictions) {
    const std::size_t n = std::min(pred.size(), truth.size());
    if (n == 0) {
      continue;
    }
    any = true;
    double sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      sum += (pred[j] - truth[j]).norm();
    }
    best.ade = std::min(best.ade, sum / static_cast<double>(n));
    best.fde = std::min(best.fde, (pred[n - 1] - truth[n - 1]).norm());
  }
  if (!any) {
    throw std::invalid_argument("min_ade_fde: no prediction overlaps the truth");
  }
  return best;
}

namespace
{

double mean_of(const std::vector<double> & v)
{
  if (v.empty()) {
    return 0.0;
  }
  double s = 0.0;
  for (double x : v) {
    s += x;
  }
  return s / static_cast<double>(v.size());
}

}  // namespace

EpisodeMetrics episode_metrics(const EpisodeLog & log)
{
  EpisodeMetrics m;
  m.seed = log.seed;
  m.method = log.method;
  m.reactive = log.reactive;
  m.outcome = log.outcome;
  m.success = log.outcome == Outcome::Parked;
  m.parked_spot = log.parked_spot;
  m.collision_with = log.collision_with;
  if (m.success) {
    m.t_park = log.t_end;
    for (std::size_t i = 0; i < log.agent_targets.size(); ++i) {
      if (log.agent_is_vehicle[i] && log.agent_targets[i] == log.parked_spot) {
        const double at = log.agent_parked_at[i];
        if (at < 0.0 || at > log.t_end + 1e-9) {
          m.stolen = true;
        }
      }
    }
  }
  for (const auto & s : log.steps) {
    m.interrupted_steps += static_cast<int>(std::count(s.braked.begin(), s.braked.end(), true));
  }
  m.spot_selection_time = mean_of(log.selection_seconds);
  if (log.planning_calls > 0) {
    double total = 0.0;
    for (double x : log.planning_seconds) {
      total += x;
    }
    m.path_planning_time = total / log.planning_calls;
  }

  // Vehicle id -> agent slot.
  std::map<int, std::size_t> slot;
  for (std::size_t i = 0; i < log.agent_ids.size(); ++i) {
    if (log.agent_is_vehicle[i]) {
      slot[log.agent_ids[i]] = i;
    }
  }
  double sum_ade = 0.0;
  double sum_fde = 0.0;
  for (std::size_t k = 0; k < log.steps.size(); ++k) {
    std::map<int, std::vector<std::vector<Vec2>>> by_agent;
    for (const auto & p : log.steps[k].predictions) {
      if (p.agent != PredictedTrajectory::Agent::Vehicle || slot.count(p.agent_id) == 0) {
        continue;
      }
      auto & set = by_agent[p.agent_id];
      set.emplace_back();
      for (const auto & q : p.poses) {
        set.back().push_back(q.position());
      }
    }
    for (const auto & [id, set] : by_agent) {
      const std::size_t i = slot.at(id);
      std::vector<Vec2> truth;
      for (std::size_t j = k + 1; j < log.steps.size(); ++j) {
        truth.push_back(log.steps[j].agents[i].position());
      }
      truth.push_back(log.final_agents[i].position());
      const auto e = min_ade_fde(set, truth);
      sum_ade += e.ade;
      sum_fde += e.fde;
      ++m.prediction_events;
    }
  }
  if (m.prediction_events > 0) {
    m.min_ade = sum_ade / m.prediction_events;
    m.min_fde = sum_fde / m.prediction_events;
  }
  return m;
}

MeanStd mean_std(std::span<const double> values)
{
  MeanStd r;
  r.n = static_cast<int>(values.size());
  if (values.empty()) {
    return r;
  }
  double s = 0.0;
  for (double x : values) {
    s += x;
  }
  r.mean = s / r.n;
  if (r.n > 1) {
    double ss = 0.0;
    for (double x : values) {
      ss += (x - r.mean) * (x - r.mean);
    }
    r.std = std::sqrt(ss / (r.n - 1));
  }
  return r;
}

Summary aggregate(std::span<const EpisodeMetrics> rows)
{
  if (rows.empty()) {
    throw std::invalid_argument("aggregate: no rows");
  }
  Summary s;
  s.method = rows.front().method;
  s.reactive = rows.front().reactive;
  s.episodes = static_cast<int>(rows.size());
  std::vector<double> interrupted;
  std::vector<double> selection;
  std::vector<double> planning;
  std::vector<double> t_park;
  std::vector<double> ade;
  std::vector<double> fde;
  int successes = 0;
  int stolen = 0;
  for (const auto & r : rows) {
    successes += r.success ? 1 : 0;
    stolen += r.stolen ? 1 : 0;
    interrupted.push_back(r.interrupted_steps);
    selection.push_back(r.spot_selection_time);
    planning.push_back(r.path_planning_time);
    if (r.t_park) {
      t_park.push_back(*r.t_park);
    }
    if (r.min_ade) {
      ade.push_back(*r.min_ade);
      fde.push_back(*r.min_fde);
    }
  }
  s.success_rate = 100.0 * successes / s.episodes;
  s.stolen_rate = 100.0 * stolen / s.episodes;
  s.interrupted = mean_std(interrupted);
  s.spot_selection_time = mean_std(selection);
  s.path_planning_time = mean_std(planning);
  s.t_park = mean_std(t_park);
  s.min_ade = mean_std(ade);
  s.min_fde = mean_std(fde);
  return s;
}

namespace
{

std::string fmt(const char * f, double x)
{
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

std::string opt(const std::optional<double> & x, const char * f = "%.4f") { return x ? fmt(f, *x) : ""; }

std::string csv_safe(std::string s)
{
  for (char & c : s) {
    if (c == ',' || c == '\n' || c == '\r') {
      c = ';';
    }
  }
  return s;
}

const char * mode(bool reactive) { return reactive ? "reactive" : "non-reactive"; }

}  // namespace

std::string episode_csv_header()
{
  return "seed,method,agents,outcome,success,stolen,interrupted_steps,t_park,min_ade,min_fde,prediction_events,"
         "parked_spot,collision_with,error";
}

std::string episode_csv_row(const EpisodeMetrics & m)
{
  return std::to_string(m.seed) + "," + to_string(m.method) + "," + mode(m.reactive) + "," + to_string(m.outcome) +
         "," + (m.success ? "1" : "0") + "," + (m.stolen ? "1" : "0") + "," + std::to_string(m.interrupted_steps) + "," +
         opt(m.t_park, "%.1f") + "," + opt(m.min_ade) + "," + opt(m.min_fde) + "," +
         std::to_string(m.prediction_events) + "," + std::to_string(m.parked_spot) + "," + m.collision_with + "," + csv_safe(m.error);
}

std::string summary_csv_header()
{
  return "method,agents,episodes,success_rate,stolen_rate,interrupted_mean,interrupted_std,t_park_mean,t_park_std,"
         "min_ade_mean,min_ade_std,min_fde_mean,min_fde_std";
}

std::string summary_csv_row(const Summary & s)
{
  return std::string(to_string(s.method)) + "," + mode(s.reactive) + "," + std::to_string(s.episodes) + "," +
         fmt("%.1f", s.success_rate) + "," + fmt("%.1f", s.stolen_rate) + "," + fmt("%.3f", s.interrupted.mean) + "," +
         fmt("%.3f", s.interrupted.std) + "," + fmt("%.1f", s.t_park.mean) + "," + fmt("%.1f", s.t_park.std) + "," +
         fmt("%.2f", s.min_ade.mean) + "," + fmt("%.2f", s.min_ade.std) + "," + fmt("%.2f", s.min_fde.mean) + "," +
         fmt("%.2f", s.min_fde.std);
}

std::string timing_csv_header() { return "seed,method,agents,spot_selection_s,path_planning_s"; }

std::string timing_csv_row(const EpisodeMetrics & m)
{
  return std::to_string(m.seed) + "," + to_string(m.method) + "," + mode(m.reactive) + "," +
         fmt("%.6f", m.spot_selection_time) + "," + fmt("%.6f", m.path_planning_time);
}

std::string timing_summary_csv_header()
{
  return "method,agents,spot_selection_mean,spot_selection_std,path_planning_mean,path_planning_std";
}

std::string timing_summary_csv_row(const Summary & s)
{
  return std::string(to_string(s.method)) + "," + mode(s.reactive) + "," + fmt("%.4f", s.spot_selection_time.mean) +
         "," + fmt("%.4f", s.spot_selection_time.std) + "," + fmt("%.4f", s.path_planning_time.mean) + "," +
         fmt("%.4f", s.path_planning_time.std);
}

}  // namespace avp
