#pragma once

#include "avp/simulation.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace avp
{

inline constexpr const char * kTraceSchema = "avp-trace/1";

struct TraceAgent
{
  int id{-1};
  bool vehicle{true};
  double length{0.0};
  double width{0.0};
  double radius{0.0};
  int target_spot{-1};
  int maneuver{0};
  int passiveness{0};
};

/// Everything needed to replay, score or draw an episode.
struct TraceData
{
  double dt{0.1};
  SensingRegion region;
  int n_ray{360};
  ParkingLot lot;
  double ego_length{4.97};
  double ego_width{1.86};
  std::vector<VehicleState> static_vehicles;
  std::vector<TraceAgent> agents;
  EpisodeLog log;
};

/*
 * Trace format: one JSON object per line.
 *
 *   {"type":"header","schema":"avp-trace/1", seed, method, reactive, dt, region, n_ray, lot,
 *    ego:{length,width}, static_vehicles:[{pose,length,width}], agents:[...]}
 *   {"type":"step", k, t, ego, agents, braked, vacant, occupied, dynamic_seen, beliefs, intents,
 *    predictions, decision, new_plan}                                  (one per timestep)
 *   {"type":"summary", outcome, t_end, parked_spot, collision_with, final_ego, final_agents,
 *    agent_parked_at, planning_calls}
 *
 * Poses are [x, y, theta]. Wall-clock timings are left out so traces of identical runs match
 * byte for byte.
 */
void write_trace(std::ostream & out, const Scenario & sc, const SimConfig & cfg, const EpisodeLog & log);
/// Throws std::runtime_error on a malformed or foreign trace.
TraceData read_trace(std::istream & in);
TraceData load_trace(const std::string & path);

}  // namespace avp
