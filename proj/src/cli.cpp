#include "landrl/cli.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "landrl/agent.hpp"
#include "landrl/checkpoint.hpp"
#include "landrl/env.hpp"
#include "landrl/errors.hpp"
#include "landrl/harness.hpp"
#include "landrl/rng.hpp"
#include "landrl/run_config.hpp"
#include "landrl/svg.hpp"
#include "landrl/text.hpp"

namespace landrl::cli {

namespace {

namespace fs = std::filesystem;

RunConfig load_config_checked(const std::string& path) {
  if (!fs::exists(path))
    throw ConfigError("configuration file " + path + " does not exist");
  return load_run_config(path);
}

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  for (auto part : split(text, ',')) {
    part = trim(part);
    if (part.empty()) continue;
    std::uint64_t value = 0;
    auto [ptr, ec] =
        std::from_chars(part.data(), part.data() + part.size(), value);
    if (ec != std::errc{} || ptr != part.data() + part.size())
      throw ConfigError("cannot parse seed \"" + std::string(part) + "\"");
    seeds.push_back(value);
  }
  if (seeds.empty()) throw ConfigError("the seed list is empty");
  return seeds;
}

harness::SweepAxis parse_axis(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 >= text.size())
    throw ConfigError("axis must look like name=value,value; got \"" + text +
                      "\"");
  harness::SweepAxis axis;
  axis.name = text.substr(0, eq);
  for (auto v : split(std::string_view(text).substr(eq + 1), ',')) {
    v = trim(v);
    if (!v.empty()) axis.values.emplace_back(v);
  }
  if (axis.values.empty())
    throw ConfigError("axis \"" + axis.name + "\" has no values");
  return axis;
}

void write_text_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << content;
  if (!out) throw IoError("write to " + path.string() + " failed");
}

nlohmann::ordered_json result_json(const harness::RunResult& run,
                                   const harness::EvalResult& eval,
                                   const RunConfig& config) {
  std::map<std::string, int> outcomes;
  for (const auto& ep : run.episodes) {
    // A still-running outcome means the per-episode step cap cut the
    // episode short.
    std::string key = ep.outcome == env::Outcome::running
                          ? "truncated"
                          : std::string(env::to_string(ep.outcome));
    outcomes[key] += 1;
  }

  nlohmann::ordered_json j;
  j["seed"] = run.seed;
  j["episodes"] = run.episodes.size();
  j["total_action_steps"] = run.total_action_steps;
  j["sync_count"] = run.sync_steps.size();
  j["final_ma10"] = run.ma10.back();
  j["final_ma100"] = run.ma100.back();
  double best = run.ma100.front();
  for (double v : run.ma100) best = std::max(best, v);
  j["best_ma100"] = best;
  j["solved"] = env::is_solved(run.ma100.back());
  j["outcomes"] = outcomes;
  j["eval"] = {{"trials", config.eval_trials},
               {"mean", eval.mean},
               {"stddev", eval.stddev}};
  // Full effective-configuration echo; reparsing it reproduces this run.
  j["config"] = to_json(config);
  return j;
}

svg::TrainingCurve curve_of(const harness::RunResult& run) {
  svg::TrainingCurve curve;
  for (std::size_t i = 0; i < run.episodes.size(); ++i) {
    curve.episode.push_back(run.episodes[i].episode);
    curve.reward.push_back(run.episodes[i].reward);
    curve.ma100.push_back(run.ma100[i]);
  }
  return curve;
}

int cmd_train(const std::string& config_path, const std::string& out_override,
              const std::string& seeds_override, int episodes_override,
              bool quiet) {
  RunConfig config = load_config_checked(config_path);
  if (!out_override.empty()) config.out_dir = out_override;
  if (!seeds_override.empty()) config.seeds = parse_seed_list(seeds_override);
  if (episodes_override > 0) config.agent.episodes = episodes_override;
  config.agent.validate();
  config.env.validate();

  const fs::path out_dir(config.out_dir);
  fs::create_directories(out_dir);
  write_text_file(out_dir / "config.json", to_json(config).dump(2) + "\n");

  for (std::uint64_t seed : config.seeds) {
    harness::RunResult run = harness::train(config.agent, config.env, seed);
    auto eval = harness::evaluate(run.final_agent.online, config.env,
                                  config.eval_trials,
                                  derive_seed(seed, 0xEA1));

    // A single seed writes straight into the output directory; several
    // seeds get one subdirectory each.
    const fs::path seed_dir =
        config.seeds.size() == 1
            ? out_dir
            : out_dir / ("seed-" + std::to_string(seed));
    fs::create_directories(seed_dir);

    std::ofstream log(seed_dir / "log.csv", std::ios::binary);
    if (!log) throw IoError("cannot write " + (seed_dir / "log.csv").string());
    harness::write_log_csv(log, run);
    log.close();

    checkpoint::AgentCheckpoint ckpt{run.final_agent.online,
                                     run.final_agent.target,
                                     run.final_agent.opt,
                                     run.total_action_steps};
    checkpoint::save(seed_dir / "checkpoint.json", ckpt);
    write_text_file(seed_dir / "result.json",
                    result_json(run, eval, config).dump(2) + "\n");
    write_text_file(seed_dir / "training.svg",
                    svg::render_training_svg(curve_of(run)));

    if (!quiet)
      std::cout << "seed " << seed << ": " << run.episodes.size()
                << " episodes, final ma100 "
                << format_double(run.ma100.back()) << ", eval mean "
                << format_double(eval.mean) << " over " << config.eval_trials
                << " trials -> " << seed_dir.string() << "\n";
  }
  return 0;
}

int cmd_eval(const std::string& ckpt_path, const std::string& config_path,
             int trials, std::uint64_t seed, const std::string& out_csv,
             const std::string& trajectory_path, bool quiet) {
  if (!fs::exists(ckpt_path))
    throw ConfigError("checkpoint file " + ckpt_path + " does not exist");
  env::EnvConfig env_config;
  int eval_trials = trials;
  if (!config_path.empty()) {
    RunConfig config = load_config_checked(config_path);
    env_config = config.env;
    if (eval_trials <= 0) eval_trials = config.eval_trials;
  }
  if (eval_trials <= 0) eval_trials = 100;

  checkpoint::AgentCheckpoint ckpt = checkpoint::load(ckpt_path);
  auto eval = harness::evaluate(ckpt.online, env_config, eval_trials, seed);

  if (!quiet)
    std::cout << "trials " << eval_trials << " mean "
              << format_double(eval.mean) << " stddev "
              << format_double(eval.stddev) << "\n";

  if (!out_csv.empty()) {
    std::ofstream out(out_csv, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + out_csv + " for writing");
    out << "trial,reward\n";
    for (std::size_t i = 0; i < eval.rewards.size(); ++i)
      out << i << ',' << format_double(eval.rewards[i]) << '\n';
  }

  if (!trajectory_path.empty()) {
    // Replay the first trial greedily, dumping every frame.
    std::ofstream out(trajectory_path, std::ios::binary | std::ios::trunc);
    if (!out)
      throw IoError("cannot open " + trajectory_path + " for writing");
    env::Lander env(env_config);
    env::Observation obs = env.reset(derive_seed(seed, 0));
    env::write_trajectory_header(out);
    int step = 0;
    while (!env.done()) {
      const int action = agent::greedy_action(ckpt.online, obs);
      auto r = env.step(action);
      step += 1;
      env::write_trajectory_row(out, step, env.state(), action, r.reward,
                                r.done);
      obs = r.observation;
    }
  }
  return 0;
}

// Per-seed (first axis value, eval_mean) series for the sweep chart. Rows
// whose trial failed are skipped; a non-numeric first axis yields nullopt.
std::optional<std::string> sweep_chart(
    const std::vector<std::string>& seed_order,
    const std::vector<harness::SweepRow>& rows, const std::string& axis_name) {
  std::vector<svg::SweepSeries> series;
  for (const auto& seed : seed_order) {
    svg::SweepSeries s;
    s.label = "seed " + seed;
    for (const auto& row : rows) {
      if (std::to_string(row.seed) != seed || row.status != "ok") continue;
      double x = 0.0;
      try {
        x = std::stod(row.axis_values[0]);
      } catch (const std::exception&) {
        return std::nullopt;
      }
      s.x.push_back(x);
      s.y.push_back(row.eval_mean);
    }
    series.push_back(std::move(s));
  }
  return svg::render_sweep_svg(series, axis_name, "eval_mean");
}

int cmd_sweep(const std::string& config_path,
              const std::vector<std::string>& axis_args,
              const std::string& seeds_override, int parallelism,
              const std::string& out_override, bool quiet) {
  RunConfig config = load_config_checked(config_path);
  if (!out_override.empty()) config.out_dir = out_override;
  if (!seeds_override.empty()) config.seeds = parse_seed_list(seeds_override);

  std::vector<harness::SweepAxis> axes;
  for (const auto& text : axis_args) axes.push_back(parse_axis(text));
  // Default grid: the exploration scale, over its best-performing band.
  if (axes.empty())
    axes.push_back({"lambda", {"0.3", "0.4", "0.5", "0.6"}});

  auto result = harness::sweep(config.agent, config.env, axes, config.seeds,
                               parallelism, config.eval_trials);

  const fs::path out_dir(config.out_dir);
  fs::create_directories(out_dir);
  std::ofstream csv(out_dir / "sweep.csv", std::ios::binary);
  if (!csv) throw IoError("cannot write " + (out_dir / "sweep.csv").string());
  harness::write_sweep_csv(csv, result);
  csv.close();

  // Chart eval_mean against the first axis when its values are numeric,
  // one series per seed.
  std::vector<std::string> seed_order;
  for (std::uint64_t seed : config.seeds)
    seed_order.push_back(std::to_string(seed));
  if (auto chart = sweep_chart(seed_order, result.rows, axes[0].name))
    write_text_file(out_dir / "sweep.svg", *chart);

  if (!quiet)
    std::cout << "wrote " << (out_dir / "sweep.csv").string() << " ("
              << result.rows.size() << " rows)\n";
  return 0;
}

// Renders either artifact kind: a training log becomes the reward/ma100
// chart, a sweep table becomes per-seed eval_mean curves. Malformed or
// empty content is a runtime failure (exit 1), not a usage error.
int cmd_plot(const std::string& log_path, const std::string& out_path,
             bool quiet) {
  if (!fs::exists(log_path))
    throw ConfigError("log file " + log_path + " does not exist");
  std::ifstream in(log_path, std::ios::binary);
  if (!in) throw IoError("cannot open " + log_path);

  std::string header;
  if (!std::getline(in, header))
    throw std::runtime_error(log_path + " is empty");
  header = std::string(trim(header));

  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    std::vector<std::string> fields;
    for (auto f : split(line, ',')) fields.emplace_back(f);
    rows.push_back(std::move(fields));
  }
  if (rows.empty()) throw std::runtime_error(log_path + " has no data rows");

  std::string chart;
  if (header == "episode,steps,reward,epsilon,ma10,ma100") {
    svg::TrainingCurve curve;
    for (const auto& fields : rows) {
      if (fields.size() != 6)
        throw std::runtime_error(log_path + " has a malformed row");
      curve.episode.push_back(std::stod(fields[0]));
      curve.reward.push_back(std::stod(fields[2]));
      curve.ma100.push_back(std::stod(fields[5]));
    }
    chart = svg::render_training_svg(curve);
  } else if (header.ends_with(",seed,final_ma100,eval_mean,eval_std,status")) {
    const auto head = split(header, ',');
    const std::size_t axis_count = head.size() - 5;
    std::vector<std::string> seed_order;
    std::vector<harness::SweepRow> parsed;
    for (const auto& fields : rows) {
      if (fields.size() != head.size())
        throw std::runtime_error(log_path + " has a malformed row");
      harness::SweepRow row;
      row.axis_values.assign(fields.begin(), fields.begin() + axis_count);
      row.seed = std::stoull(fields[axis_count]);
      row.eval_mean = std::stod(fields[axis_count + 2]);
      row.status = fields[axis_count + 4];
      if (std::find(seed_order.begin(), seed_order.end(),
                    fields[axis_count]) == seed_order.end())
        seed_order.push_back(fields[axis_count]);
      parsed.push_back(std::move(row));
    }
    auto rendered = sweep_chart(seed_order, parsed, std::string(head[0]));
    if (!rendered)
      throw std::runtime_error(log_path +
                               " has a non-numeric first axis column");
    chart = *rendered;
  } else {
    throw std::runtime_error(log_path +
                             " is neither a training log nor a sweep table");
  }
  write_text_file(out_path, chart);
  if (!quiet) std::cout << "wrote " << out_path << "\n";
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"train, evaluate, and sweep a double DQN lunar-lander agent"};
  app.require_subcommand(1);

  std::string config_path, out_dir, seeds, ckpt_path, out_csv, trajectory;
  std::string log_path, svg_path;
  std::vector<std::string> axis_args;
  int episodes = 0, trials = 0, parallelism = 1;
  std::uint64_t eval_seed = 1;
  bool quiet = false;

  app.add_flag("--quiet", quiet, "suppress progress output");

  auto* train = app.add_subcommand("train", "train one agent per seed");
  train->add_option("--config", config_path, "run configuration JSON")
      ->required();
  train->add_option("--out", out_dir, "output directory override");
  train->add_option("--seeds,--seed", seeds, "comma-separated seed override");
  train->add_option("--episodes", episodes, "episode-count override");

  auto* eval = app.add_subcommand("eval", "greedy evaluation of a checkpoint");
  eval->add_option("--checkpoint", ckpt_path, "checkpoint JSON")->required();
  eval->add_option("--config", config_path, "run configuration JSON");
  eval->add_option("--trials", trials, "number of evaluation episodes");
  eval->add_option("--seed", eval_seed, "evaluation seed");
  eval->add_option("--out", out_csv, "per-trial reward CSV path");
  eval->add_option("--trajectory", trajectory,
                   "dump the first trial's frames to this CSV");

  auto* sweep = app.add_subcommand("sweep", "hyperparameter cross product");
  sweep->add_option("--config", config_path, "run configuration JSON")
      ->required();
  sweep->add_option("--axis,--axes", axis_args,
                    "axis as name=value,value (repeatable)");
  sweep->add_option("--seeds,--seed", seeds, "comma-separated seed override");
  sweep->add_option("--parallelism", parallelism, "worker threads");
  sweep->add_option("--out", out_dir, "output directory override");

  auto* plot = app.add_subcommand("plot",
                                  "render a training log or sweep table");
  plot->add_option("--log", log_path, "log.csv or sweep.csv from a run")
      ->required();
  plot->add_option("--out", svg_path, "SVG output path")->required();

  // Let --quiet appear after the subcommand name as well as before it.
  for (auto* sub : {train, eval, sweep, plot}) sub->fallthrough();

  std::vector<std::string> argv_storage = {"landrl"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  argv.reserve(argv_storage.size());
  for (const auto& s : argv_storage) argv.push_back(s.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
    if (train->parsed())
      return cmd_train(config_path, out_dir, seeds, episodes, quiet);
    if (eval->parsed())
      return cmd_eval(ckpt_path, config_path, trials, eval_seed, out_csv,
                      trajectory, quiet);
    if (sweep->parsed())
      return cmd_sweep(config_path, axis_args, seeds, parallelism, out_dir,
                       quiet);
    if (plot->parsed()) return cmd_plot(log_path, svg_path, quiet);
    return 2;
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    std::cout << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace landrl::cli
