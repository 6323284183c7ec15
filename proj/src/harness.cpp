#include "landrl/harness.hpp"

#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "landrl/errors.hpp"
#include "landrl/replay.hpp"
#include "landrl/rng.hpp"
#include "landrl/text.hpp"

namespace landrl::harness {

namespace {

// Seed streams hanging off one run seed. Episode resets use
// derive_seed(seed, kEpisodeStream + episode index).
constexpr std::uint64_t kNetStream = 1;
constexpr std::uint64_t kReplayStream = 2;
constexpr std::uint64_t kExploreStream = 3;
constexpr std::uint64_t kSampleStream = 4;
constexpr std::uint64_t kEpisodeStream = 1000;

template <typename T>
T parse_number(std::string_view text, std::string_view what) {
  T value{};
  auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size())
    throw ConfigError("cannot parse \"" + std::string(text) + "\" as " +
                      std::string(what));
  return value;
}

}  // namespace

RunResult train(const agent::AgentConfig& config,
                const env::EnvConfig& env_config, std::uint64_t seed) {
  config.validate();
  env_config.validate();
  const auto started = std::chrono::steady_clock::now();

  RunResult result;
  result.config = config;
  result.env_config = env_config;
  result.seed = seed;

  env::Lander env(env_config);
  agent::Agent learner = agent::Agent::make(config, derive_seed(seed, kNetStream));
  replay::ReplayBuffer buffer(config.memory_capacity);
  replay::seed_random(buffer, env, derive_seed(seed, kReplayStream));

  Rng explore(derive_seed(seed, kExploreStream));
  Rng sampler(derive_seed(seed, kSampleStream));

  std::vector<double> rewards;
  for (int ep = 1; ep <= config.episodes; ++ep) {
    learner.episode_index = ep;
    env::Observation obs =
        env.reset(derive_seed(seed, kEpisodeStream + static_cast<std::uint64_t>(ep)));

    EpisodeStats stats;
    stats.episode = ep;
    double episode_eps =
        agent::epsilon(config.epsilon_basis == agent::EpsilonBasis::episode
                           ? ep
                           : learner.action_steps + 1,
                       config.lambda);
    stats.epsilon = episode_eps;

    while (true) {
      const double eps =
          config.epsilon_basis == agent::EpsilonBasis::episode
              ? episode_eps
              : agent::epsilon(learner.action_steps + 1, config.lambda);
      const int action = agent::select_action(learner, obs, eps, explore);
      auto step = env.step(action);
      buffer.push({obs, action, step.reward, step.observation, step.done});
      learner.action_steps += 1;
      agent::learn_step(learner, buffer, config, sampler);
      if (agent::maybe_sync_target(learner, config))
        result.sync_steps.push_back(learner.action_steps);

      obs = step.observation;
      stats.reward += step.reward;
      stats.steps += 1;
      if (step.done || stats.steps >= config.max_steps_per_episode) {
        stats.outcome = step.outcome;
        break;
      }
    }
    rewards.push_back(stats.reward);
    result.episodes.push_back(stats);
  }

  result.ma10 = moving_average(rewards, 10);
  result.ma100 = moving_average(rewards, 100);
  result.final_agent = std::move(learner);
  result.total_action_steps = result.final_agent.action_steps;
  result.duration_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started)
          .count();
  return result;
}

EvalResult evaluate(const nn::MlpParams& policy,
                    const env::EnvConfig& env_config, int trials,
                    std::uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  env_config.validate();

  EvalResult result;
  env::Lander env(env_config);
  for (int trial = 0; trial < trials; ++trial) {
    env::Observation obs =
        env.reset(derive_seed(seed, static_cast<std::uint64_t>(trial)));
    double total = 0.0;
    while (!env.done()) {
      auto step = env.step(agent::greedy_action(policy, obs));
      obs = step.observation;
      total += step.reward;
    }
    result.rewards.push_back(total);
  }

  double mean = 0.0;
  for (double r : result.rewards) mean += r;
  mean /= result.rewards.size();
  double var = 0.0;
  for (double r : result.rewards) var += (r - mean) * (r - mean);
  var /= result.rewards.size();
  result.mean = mean;
  result.stddev = std::sqrt(var);
  return result;
}

std::vector<double> moving_average(std::span<const double> series,
                                   int window) {
  if (window < 1) throw std::invalid_argument("window must be >= 1");
  std::vector<double> out;
  out.reserve(series.size());
  // Plain per-entry summation: no rolling-sum drift, and cheap at the
  // window sizes in use.
  for (std::size_t i = 0; i < series.size(); ++i) {
    const std::size_t lo =
        i + 1 > static_cast<std::size_t>(window) ? i + 1 - window : 0;
    double sum = 0.0;
    for (std::size_t k = lo; k <= i; ++k) sum += series[k];
    out.push_back(sum / static_cast<double>(i - lo + 1));
  }
  return out;
}

agent::AgentConfig apply_axis(const agent::AgentConfig& base,
                              std::string_view name, std::string_view value) {
  agent::AgentConfig c = base;
  if (name == "gamma") {
    c.gamma = parse_number<double>(value, "gamma");
  } else if (name == "lambda") {
    c.lambda = parse_number<double>(value, "lambda");
  } else if (name == "learning_rate") {
    c.learning_rate = parse_number<double>(value, "learning_rate");
  } else if (name == "hidden") {
    const auto x = value.find('x');
    if (x == std::string_view::npos || x == 0 || x + 1 >= value.size())
      throw ConfigError("hidden expects WIDTHxWIDTH, got \"" +
                        std::string(value) + "\"");
    c.hidden1 = parse_number<int>(value.substr(0, x), "hidden1");
    c.hidden2 = parse_number<int>(value.substr(x + 1), "hidden2");
  } else if (name == "batch_size") {
    c.batch_size = parse_number<int>(value, "batch_size");
  } else if (name == "target_sync_steps") {
    c.target_sync_steps = parse_number<long long>(value, "target_sync_steps");
  } else if (name == "memory_capacity") {
    c.memory_capacity = parse_number<int>(value, "memory_capacity");
  } else if (name == "episodes") {
    c.episodes = parse_number<int>(value, "episodes");
  } else if (name == "max_steps_per_episode") {
    c.max_steps_per_episode =
        parse_number<int>(value, "max_steps_per_episode");
  } else if (name == "target_mode") {
    c.target_mode = agent::target_mode_from_string(value);
  } else if (name == "epsilon_basis") {
    c.epsilon_basis = agent::epsilon_basis_from_string(value);
  } else {
    throw ConfigError("unknown sweep axis \"" + std::string(name) + "\"");
  }
  return c;
}

SweepResult sweep(const agent::AgentConfig& base,
                  const env::EnvConfig& env_config,
                  const std::vector<SweepAxis>& axes,
                  const std::vector<std::uint64_t>& seeds, int parallelism,
                  int eval_trials) {
  if (parallelism < 1) throw ConfigError("parallelism must be >= 1");
  if (seeds.empty()) throw ConfigError("sweep needs at least one seed");
  if (eval_trials < 1) throw ConfigError("eval_trials must be >= 1");
  for (const auto& axis : axes)
    if (axis.values.empty())
      throw ConfigError("sweep axis \"" + axis.name + "\" has no values");

  SweepResult result;
  for (const auto& axis : axes) result.axis_names.push_back(axis.name);

  // Materialize the full cross product up front: combo index -> one value
  // per axis, seeds cycling fastest.
  std::size_t combos = 1;
  for (const auto& axis : axes) combos *= axis.values.size();
  struct Trial {
    std::vector<std::string> values;
    std::uint64_t listed_seed;
    std::uint64_t trial_seed;
  };
  std::vector<Trial> trials;
  for (std::size_t combo = 0; combo < combos; ++combo) {
    std::vector<std::string> values;
    std::size_t rest = combo;
    for (std::size_t a = axes.size(); a-- > 0;) {
      values.insert(values.begin(), axes[a].values[rest % axes[a].values.size()]);
      rest /= axes[a].values.size();
    }
    std::string tag;
    for (std::size_t a = 0; a < axes.size(); ++a)
      tag += axes[a].name + "=" + values[a] + ";";
    for (std::uint64_t listed : seeds) {
      Trial t;
      t.values = values;
      t.listed_seed = listed;
      t.trial_seed = derive_seed(fnv1a64(tag) ^ listed, trials.size());
      trials.push_back(std::move(t));
    }
  }

  result.rows.resize(trials.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= trials.size()) return;
      const Trial& t = trials[i];
      SweepRow& row = result.rows[i];
      row.axis_values = t.values;
      row.seed = t.listed_seed;
      try {
        agent::AgentConfig cfg = base;
        for (std::size_t a = 0; a < axes.size(); ++a)
          cfg = apply_axis(cfg, axes[a].name, t.values[a]);
        cfg.validate();
        RunResult run = train(cfg, env_config, t.trial_seed);
        auto eval = evaluate(run.final_agent.online, env_config, eval_trials,
                             derive_seed(t.trial_seed, 0xE));
        row.final_ma100 = run.ma100.back();
        row.eval_mean = eval.mean;
        row.eval_std = eval.stddev;
        row.status = "ok";
      } catch (const std::exception&) {
        row.final_ma100 = std::numeric_limits<double>::quiet_NaN();
        row.eval_mean = std::numeric_limits<double>::quiet_NaN();
        row.eval_std = std::numeric_limits<double>::quiet_NaN();
        row.status = "error";
      }
    }
  };

  const std::size_t threads =
      std::min(static_cast<std::size_t>(parallelism), trials.size());
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return result;
}

void write_log_csv(std::ostream& out, const RunResult& result) {
  out << "episode,steps,reward,epsilon,ma10,ma100\n";
  for (std::size_t i = 0; i < result.episodes.size(); ++i) {
    const auto& ep = result.episodes[i];
    out << ep.episode << ',' << ep.steps << ',' << format_double(ep.reward)
        << ',' << format_double(ep.epsilon) << ','
        << format_double(result.ma10[i]) << ','
        << format_double(result.ma100[i]) << '\n';
  }
}

void write_sweep_csv(std::ostream& out, const SweepResult& result) {
  for (const auto& name : result.axis_names) out << name << ',';
  out << "seed,final_ma100,eval_mean,eval_std,status\n";
  for (const auto& row : result.rows) {
    for (const auto& v : row.axis_values) out << v << ',';
    out << row.seed << ',' << format_double(row.final_ma100) << ','
        << format_double(row.eval_mean) << ',' << format_double(row.eval_std)
        << ',' << row.status << '\n';
  }
}

}  // namespace landrl::harness
