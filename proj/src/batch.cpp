#include "avp/batch.hpp"

#include <atomic>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace avp
{

EpisodeMetrics error_row(std::uint64_t seed, Method method, bool reactive, const std::string & what)
{
  EpisodeMetrics m;
  m.seed = seed;
  m.method = method;
  m.reactive = reactive;
  m.outcome = Outcome::Error;
  m.error = what;
  return m;
}

EpisodeLog run_seeded_episode(
  const ExperimentConfig & cfg, Method method, std::uint64_t seed, bool reactive, IntentionScorer * scorer,
  Scenario * scenario_out)
{
  const SimConfig sim = cfg.sim_config(method, seed, reactive);
  Scenario sc = generate_scenario_reseeding(sim.scenario);
  sc.seed = seed;
  EpisodeLog log = run_episode(sc, sim, scorer);
  if (scenario_out) {
    *scenario_out = std::move(sc);
  }
  return log;
}

BatchResult run_batch(const ExperimentConfig & cfg, int workers, const BatchProgress & progress)
{
  cfg.validate();
  struct Job
  {
    Method method;
    bool reactive;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  std::vector<bool> modes{cfg.reactive};
  if (cfg.both_modes) {
    modes = {true, false};
  }
  for (bool reactive : modes) {
    for (Method m : cfg.methods) {
      for (int e = 0; e < cfg.episodes; ++e) {
        jobs.push_back({m, reactive, cfg.seed + static_cast<std::uint64_t>(e)});
      }
    }
  }

  if (workers <= 0) {
    workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  }
  workers = std::min<int>(workers, static_cast<int>(jobs.size()));

  BatchResult result;
  result.rows.resize(jobs.size());
  std::atomic<std::size_t> next{0};
  std::atomic<int> done{0};
  std::mutex progress_mutex;
  auto worker = [&] {
    std::unique_ptr<IntentionScorer> scorer;
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      const Job & job = jobs[i];
      try {
        if (!scorer) {
          scorer = cfg.make_scorer();
        }
        const EpisodeLog log = run_seeded_episode(cfg, job.method, job.seed, job.reactive, scorer.get());
        result.rows[i] = episode_metrics(log);
      } catch (const std::exception & e) {
        result.rows[i] = error_row(job.seed, job.method, job.reactive, e.what());
      }
      const int d = ++done;
      if (progress) {
        std::lock_guard<std::mutex> lock(progress_mutex);
        progress(d, static_cast<int>(jobs.size()));
      }
    }
  };
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) {
    pool.emplace_back(worker);
  }
  worker();
  for (auto & t : pool) {
    t.join();
  }

  for (const auto & r : result.rows) {
    result.errors += r.outcome == Outcome::Error ? 1 : 0;
  }
  std::size_t begin = 0;
  while (begin < result.rows.size()) {
    std::size_t end = begin;
    while (end < result.rows.size() && result.rows[end].method == result.rows[begin].method &&
           result.rows[end].reactive == result.rows[begin].reactive) {
      ++end;
    }
    result.summaries.push_back(aggregate(std::span(result.rows).subspan(begin, end - begin)));
    begin = end;
  }
  return result;
}

namespace
{

std::ofstream open_table(const std::filesystem::path & p)
{
  std::ofstream out(p);
  if (!out) {
    throw std::runtime_error("cannot write " + p.string());
  }
  return out;
}

}  // namespace

void write_batch_tables(const BatchResult & result, const std::string & dir)
{
  const std::filesystem::path d(dir);
  std::filesystem::create_directories(d);
  auto episodes = open_table(d / "episodes.csv");
  episodes << episode_csv_header() << '\n';
  for (const auto & r : result.rows) {
    episodes << episode_csv_row(r) << '\n';
  }
  auto summary = open_table(d / "summary.csv");
  summary << summary_csv_header() << '\n';
  for (const auto & s : result.summaries) {
    summary << summary_csv_row(s) << '\n';
  }
  auto timings = open_table(d / "timings.csv");
  timings << timing_csv_header() << '\n';
  for (const auto & r : result.rows) {
    timings << timing_csv_row(r) << '\n';
  }
  auto timing_summary = open_table(d / "timing_summary.csv");
  timing_summary << timing_summary_csv_header() << '\n';
  for (const auto & s : result.summaries) {
    timing_summary << timing_summary_csv_row(s) << '\n';
  }
}

}  // namespace avp
