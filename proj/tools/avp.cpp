#include "avp/batch.hpp"
#include "avp/config.hpp"
#include "avp/render.hpp"
#include "avp/trace.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <unistd.h>

namespace fs = std::filesystem;
using namespace avp;

namespace
{

struct Common
{
  std::string config;
  std::string method;
  int episodes{0};
  long long seed{-1};
  std::string reactive;
  std::string out;
  int workers{-1};
  std::string scorer_cmd;
};

void add_common(CLI::App * app, Common & c, bool batch)
{
  app->add_option("--config", c.config, "experiment file (JSON); defaults apply when omitted");
  app->add_option(
    "--method", c.method, batch ? "comma-separated methods, or 'all'" : "spot-selection method");
  app->add_option("--seed", c.seed, batch ? "first seed" : "scenario seed");
  app->add_option("--reactive", c.reactive, batch ? "true, false or both" : "true or false");
  app->add_option("--out", c.out, "output directory");
  app->add_option("--scorer-cmd", c.scorer_cmd, "external intention scorer command");
  if (batch) {
    app->add_option("--episodes", c.episodes, "episodes per method")->check(CLI::PositiveNumber);
    app->add_option("--workers", c.workers, "worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);
  }
}

bool parse_bool(const std::string & s)
{
  if (s == "true" || s == "1" || s == "yes" || s == "on") {
    return true;
  }
  if (s == "false" || s == "0" || s == "no" || s == "off") {
    return false;
  }
  throw std::invalid_argument("--reactive: expected true or false, got '" + s + "'");
}

std::vector<Method> parse_methods(const std::string & s)
{
  if (s == "all") {
    return all_methods();
  }
  std::vector<Method> out;
  std::stringstream ss(s);
  std::string name;
  while (std::getline(ss, name, ',')) {
    out.push_back(parse_method(name));
  }
  return out;
}

/// File settings first, then command-line overrides.
ExperimentConfig resolve(const Common & c, bool batch)
{
  ExperimentConfig cfg = c.config.empty() ? ExperimentConfig{} : load_config(c.config);
  if (!c.method.empty()) {
    cfg.methods = parse_methods(c.method);
    if (!batch && cfg.methods.size() != 1) {
      throw std::invalid_argument("--method: run takes a single method");
    }
  }
  if (c.episodes > 0) {
    cfg.episodes = c.episodes;
  }
  if (c.seed >= 0) {
    cfg.seed = static_cast<std::uint64_t>(c.seed);
  }
  if (!c.reactive.empty()) {
    if (batch && c.reactive == "both") {
      cfg.both_modes = true;
    } else {
      cfg.reactive = parse_bool(c.reactive);
      cfg.both_modes = false;
    }
  }
  if (!c.out.empty()) {
    cfg.out = c.out;
  }
  if (c.workers >= 0) {
    cfg.workers = c.workers;
  }
  if (!c.scorer_cmd.empty()) {
    cfg.scorer.kind = ScorerSelection::Kind::External;
    cfg.scorer.command = c.scorer_cmd;
  }
  cfg.validate();
  return cfg;
}

std::string mode_name(bool reactive) { return reactive ? "reactive" : "non-reactive"; }

int cmd_run(const Common & c)
{
  const ExperimentConfig cfg = resolve(c, false);
  const Method method = cfg.methods.front();
  auto scorer = cfg.make_scorer();
  Scenario sc;
  const EpisodeLog log = run_seeded_episode(cfg, method, cfg.seed, cfg.reactive, scorer.get(), &sc);
  const EpisodeMetrics m = episode_metrics(log);

  fs::create_directories(cfg.out);
  const std::string stem =
    std::string(to_string(method)) + "_" + mode_name(cfg.reactive) + "_seed" + std::to_string(cfg.seed);
  const fs::path trace_path = fs::path(cfg.out) / (stem + ".trace.ndjson");
  {
    std::ofstream out(trace_path);
    if (!out) {
      throw std::runtime_error("cannot write " + trace_path.string());
    }
    write_trace(out, sc, cfg.sim_config(method, cfg.seed, cfg.reactive), log);
  }
  const fs::path row_path = fs::path(cfg.out) / (stem + ".csv");
  {
    std::ofstream out(row_path);
    out << episode_csv_header() << '\n' << episode_csv_row(m) << '\n';
  }
  std::cout << episode_csv_header() << '\n' << episode_csv_row(m) << '\n';
  std::cerr << "trace: " << trace_path.string() << '\n';
  return 0;
}

void print_table(const BatchResult & r)
{
  std::printf(
    "%-22s %-13s %8s %8s %12s %14s %16s %16s %12s %12s\n", "method", "agents", "success%", "stolen%", "interrupted",
    "t_park [s]", "selection [s]", "planning [s]", "minADE", "minFDE");
  for (const auto & s : r.summaries) {
    std::printf(
      "%-22s %-13s %8.1f %8.1f %5.2f±%-6.2f %6.1f±%-7.1f %6.4f±%-7.4f %5.3f±%-6.3f %5.2f±%-6.2f %5.2f±%-6.2f\n",
      to_string(s.method), mode_name(s.reactive).c_str(), s.success_rate, s.stolen_rate, s.interrupted.mean,
      s.interrupted.std, s.t_park.mean, s.t_park.std, s.spot_selection_time.mean, s.spot_selection_time.std,
      s.path_planning_time.mean, s.path_planning_time.std, s.min_ade.mean, s.min_ade.std, s.min_fde.mean,
      s.min_fde.std);
  }
}

int cmd_batch(const Common & c, bool compare)
{
  Common args = c;
  if (compare && args.method.empty()) {
    args.method = "all";
  }
  const ExperimentConfig cfg = resolve(args, true);
  const bool tty = isatty(fileno(stderr));
  const auto result = run_batch(cfg, cfg.workers, [tty](int done, int total) {
    if (tty) {
      std::fprintf(stderr, "\r%d/%d episodes", done, total);
      if (done == total) {
        std::fprintf(stderr, "\n");
      }
    }
  });
  write_batch_tables(result, cfg.out);
  if (compare) {
    print_table(result);
  } else {
    std::cout << summary_csv_header() << '\n';
    for (const auto & s : result.summaries) {
      std::cout << summary_csv_row(s) << '\n';
    }
  }
  if (result.errors > 0) {
    std::cerr << result.errors << " episode(s) failed with an error; see episodes.csv\n";
  }
  std::cerr << "tables written to " << cfg.out << '\n';
  return 0;
}

int cmd_render(const std::string & trace_path, const std::vector<int> & frames, bool all, int every,
               const std::string & out_dir)
{
  const TraceData trace = load_trace(trace_path);
  std::vector<int> selected = frames;
  if (all) {
    selected.clear();
    for (int k = 0; k < static_cast<int>(trace.log.steps.size()); k += std::max(1, every)) {
      selected.push_back(k);
    }
  }
  if (selected.empty()) {
    selected.push_back(0);
  }
  fs::create_directories(out_dir);
  for (int k : selected) {
    const std::string svg = render_frame_svg(trace, k);
    char name[32];
    std::snprintf(name, sizeof name, "frame_%05d.svg", k);
    std::ofstream out(fs::path(out_dir) / name);
    if (!out) {
      throw std::runtime_error("cannot write " + (fs::path(out_dir) / name).string());
    }
    out << svg;
  }
  std::cerr << selected.size() << " frame(s) written to " << out_dir << '\n';
  return 0;
}

}  // namespace

int main(int argc, char ** argv)
{
  CLI::App app{"Autonomous valet parking simulator"};
  app.require_subcommand(1);

  Common run_args;
  auto * run = app.add_subcommand("run", "run one seeded episode, writing its trace and metrics row");
  add_common(run, run_args, false);

  Common batch_args;
  auto * batch = app.add_subcommand("batch", "run seeded episodes per method and write metric tables");
  add_common(batch, batch_args, true);

  Common compare_args;
  auto * compare = app.add_subcommand("compare", "paired batch over several methods, printed as a table");
  add_common(compare, compare_args, true);

  std::string trace_path;
  std::vector<int> frames;
  bool all_frames = false;
  int every = 1;
  std::string render_out = "frames";
  auto * render = app.add_subcommand("render", "draw trace frames as SVG");
  render->add_option("trace", trace_path, "trace file")->required();
  render->add_option("--frame", frames, "frame index (repeatable)");
  render->add_flag("--all", all_frames, "every frame");
  render->add_option("--every", every, "with --all, keep every n-th frame")->check(CLI::PositiveNumber);
  render->add_option("--out", render_out, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      return cmd_run(run_args);
    }
    if (batch->parsed()) {
      return cmd_batch(batch_args, false);
    }
    if (compare->parsed()) {
      return cmd_batch(compare_args, true);
    }
    if (render->parsed()) {
      return cmd_render(trace_path, frames, all_frames, every, render_out);
    }
  } catch (const std::invalid_argument & e) {
    std::cerr << "avp: " << e.what() << '\n';
    return 2;
  } catch (const std::exception & e) {
    std::cerr << "avp: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
