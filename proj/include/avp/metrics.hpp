#pragma once

#include "avp/simulation.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace avp
{

struct DisplacementError
{
  double ade{0.0};
  double fde{0.0};
};

/// Minimum ADE and minimum FDE over a prediction set, each minimized on its own. Each prediction
/// is compared over min(its length, truth length) steps; predictions with no overlap are skipped.
/// Throws std::invalid_argument for an empty set or when nothing overlaps the truth.
DisplacementError min_ade_fde(std::span<const std::vector<Vec2>> predictions, std::span<const Vec2> truth);

struct EpisodeMetrics
{
  std::uint64_t seed{0};
  Method method{Method::ExplicitPastBezier};
  bool reactive{true};
  Outcome outcome{Outcome::Timeout};
  bool success{false};
  bool stolen{false};
  int interrupted_steps{0};
  std::optional<double> t_park;
  double spot_selection_time{0.0};
  double path_planning_time{0.0};
  std::optional<double> min_ade;
  std::optional<double> min_fde;
  int prediction_events{0};
  int parked_spot{-1};
  std::string collision_with;
  /// Set when the episode threw.
  std::string error;
};

EpisodeMetrics episode_metrics(const EpisodeLog & log);

struct MeanStd
{
  double mean{0.0};
  double std{0.0};
  int n{0};
};

/// Mean and sample standard deviation (0 for a single value); n = 0 when empty.
MeanStd mean_std(std::span<const double> values);

struct Summary
{
  Method method{Method::ExplicitPastBezier};
  bool reactive{true};
  int episodes{0};
  double success_rate{0.0};
  double stolen_rate{0.0};
  MeanStd interrupted;
  MeanStd spot_selection_time;
  MeanStd path_planning_time;
  /// Successful episodes only.
  MeanStd t_park;
  MeanStd min_ade;
  MeanStd min_fde;
};

/// Throws std::invalid_argument on an empty input.
Summary aggregate(std::span<const EpisodeMetrics> rows);

/// Metric tables hold no timings so that reruns produce identical bytes; timings go to their
/// own tables.
std::string episode_csv_header();
std::string episode_csv_row(const EpisodeMetrics & m);
std::string summary_csv_header();
std::string summary_csv_row(const Summary & s);
std::string timing_csv_header();
std::string timing_csv_row(const EpisodeMetrics & m);
std::string timing_summary_csv_header();
std::string timing_summary_csv_row(const Summary & s);

}  // namespace avp
