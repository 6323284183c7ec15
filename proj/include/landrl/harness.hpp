#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "landrl/agent.hpp"
#include "landrl/env.hpp"

namespace landrl::harness {

struct EpisodeStats {
  int episode = 0;  // 1-based
  double reward = 0.0;
  int steps = 0;
  double epsilon = 0.0;
  env::Outcome outcome = env::Outcome::running;
};

// Everything one training run produces. ma10/ma100 have one entry per
// episode (partial windows at the start); sync_steps records the global
// action step of every target sync.
struct RunResult {
  std::vector<EpisodeStats> episodes;
  std::vector<double> ma10;
  std::vector<double> ma100;
  agent::Agent final_agent;
  agent::AgentConfig config;
  env::EnvConfig env_config;
  std::uint64_t seed = 0;
  std::vector<long long> sync_steps;
  long long total_action_steps = 0;
  double duration_seconds = 0.0;  // wall clock; never serialized
};

// Seeds replay to capacity with random rollouts, then runs
// config.episodes episodes: per-step action selection, replay push, one
// learning update, and a possible target sync. Deterministic in seed.
RunResult train(const agent::AgentConfig& config,
                const env::EnvConfig& env_config, std::uint64_t seed);

struct EvalResult {
  double mean = 0.0;
  double stddev = 0.0;  // population
  std::vector<double> rewards;
};

// Greedy episodes (epsilon 0), no learning, no replay writes.
EvalResult evaluate(const nn::MlpParams& policy,
                    const env::EnvConfig& env_config, int trials,
                    std::uint64_t seed);

// Trailing mean; entry i averages series[max(0, i-window+1) ..= i].
std::vector<double> moving_average(std::span<const double> series, int window);

// One sweep axis: a config field name and the values to try.
// Supported names: gamma, lambda, learning_rate, hidden (e.g. "128x256"),
// batch_size, target_sync_steps, memory_capacity, episodes,
// max_steps_per_episode, target_mode, epsilon_basis.
struct SweepAxis {
  std::string name;
  std::vector<std::string> values;
};

struct SweepRow {
  std::vector<std::string> axis_values;
  std::uint64_t seed = 0;
  double final_ma100 = 0.0;
  double eval_mean = 0.0;
  double eval_std = 0.0;
  std::string status;  // "ok" or "error"
};

struct SweepResult {
  std::vector<std::string> axis_names;
  std::vector<SweepRow> rows;
};

// Applies one axis value to a config copy. Throws ConfigError for unknown
// names or unparsable values.
agent::AgentConfig apply_axis(const agent::AgentConfig& base,
                              std::string_view name, std::string_view value);

// Cross product of axis values x seeds, each trial trained and evaluated in
// isolation with a seed derived from (axis values, listed seed, trial
// index). Row order is fixed by the enumeration, never by scheduling, so
// any parallelism produces the same table. A failed trial gets status
// "error" and NaN metrics without aborting the sweep.
SweepResult sweep(const agent::AgentConfig& base,
                  const env::EnvConfig& env_config,
                  const std::vector<SweepAxis>& axes,
                  const std::vector<std::uint64_t>& seeds, int parallelism,
                  int eval_trials = 100);

// episode,steps,reward,epsilon,ma10,ma100 — one row per episode.
void write_log_csv(std::ostream& out, const RunResult& result);

// axis columns...,seed,final_ma100,eval_mean,eval_std,status
void write_sweep_csv(std::ostream& out, const SweepResult& result);

}  // namespace landrl::harness
