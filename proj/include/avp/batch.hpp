#pragma once

#include "avp/config.hpp"
#include "avp/metrics.hpp"

#include <functional>
#include <string>
#include <vector>

namespace avp
{

struct BatchResult
{
  /// Ordered by agent mode, then method, then seed, whatever the worker count.
  std::vector<EpisodeMetrics> rows;
  /// One per (mode, method).
  std::vector<Summary> summaries;
  int errors{0};
};

/// Metrics row for an episode that threw.
EpisodeMetrics error_row(std::uint64_t seed, Method method, bool reactive, const std::string & what);

/// Runs one seeded episode end to end; the scenario is shared by every method for a given seed.
EpisodeLog run_seeded_episode(
  const ExperimentConfig & cfg, Method method, std::uint64_t seed, bool reactive, IntentionScorer * scorer,
  Scenario * scenario_out = nullptr);

using BatchProgress = std::function<void(int done, int total)>;

/// Seeds seed .. seed + episodes - 1 for every configured method and agent mode, on
/// `workers` threads (0 = hardware concurrency). Episode exceptions become error rows.
BatchResult run_batch(const ExperimentConfig & cfg, int workers = 0, const BatchProgress & progress = {});

/// episodes.csv, summary.csv, timings.csv and timing_summary.csv under `dir` (created if needed).
void write_batch_tables(const BatchResult & result, const std::string & dir);

}  // namespace avp
