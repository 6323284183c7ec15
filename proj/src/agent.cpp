#include "landrl/agent.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "landrl/errors.hpp"

namespace landrl::agent {

std::string_view to_string(TargetMode m) {
  return m == TargetMode::double_q ? "double" : "max";
}

TargetMode target_mode_from_string(std::string_view s) {
  if (s == "double") return TargetMode::double_q;
  if (s == "max") return TargetMode::max_q;
  throw ConfigError("unknown target mode '" + std::string(s) +
                    "' (expected double or max)");
}

std::string_view to_string(EpsilonBasis b) {
  return b == EpsilonBasis::episode ? "episode" : "step";
}

EpsilonBasis epsilon_basis_from_string(std::string_view s) {
  if (s == "episode") return EpsilonBasis::episode;
  if (s == "step") return EpsilonBasis::step;
  throw ConfigError("unknown epsilon basis '" + std::string(s) +
                    "' (expected episode or step)");
}

nn::LayerSpec AgentConfig::layer_spec() const {
  nn::LayerSpec spec;
  spec.sizes = {8, hidden1, hidden2, 4};
  spec.activations = {nn::Activation::relu, nn::Activation::tanh,
                      nn::Activation::linear};
  return spec;
}

void AgentConfig::validate() const {
  if (!(gamma >= 0.0 && gamma <= 1.0))
    throw ConfigError("gamma must lie in [0, 1]");
  if (!(lambda > 0.0 && lambda <= 1.0))
    throw ConfigError("lambda must lie in (0, 1]");
  if (episodes < 1) throw ConfigError("episodes must be >= 1");
  if (memory_capacity < 1) throw ConfigError("memory capacity must be >= 1");
  if (batch_size < 1) throw ConfigError("batch size must be >= 1");
  if (batch_size > memory_capacity)
    throw ConfigError("batch size cannot exceed memory capacity");
  if (target_sync_steps < 1) throw ConfigError("sync cadence must be >= 1");
  if (hidden1 < 1 || hidden2 < 1)
    throw ConfigError("hidden widths must be >= 1");
  if (!(learning_rate > 0.0)) throw ConfigError("learning rate must be > 0");
  if (max_steps_per_episode < 1)
    throw ConfigError("episode step cap must be >= 1");
}

Agent Agent::make(const AgentConfig& config, std::uint64_t seed) {
  config.validate();
  Agent a;
  a.online = nn::init_params(config.layer_spec(), seed);
  a.target = a.online;
  a.opt = nn::AdamaxState::fresh(a.online);
  return a;
}

double epsilon(long long n, double lambda) {
  if (n < 0) throw std::invalid_argument("epsilon index must be >= 0");
  if (n == 0) return 1.0;
  return std::min(1.0, lambda / std::sqrt(static_cast<double>(n)));
}

int greedy_action(const nn::MlpParams& params, const env::Observation& obs) {
  Eigen::VectorXd q = nn::forward(params, obs);
  int best = 0;
  for (int i = 1; i < q.size(); ++i)
    if (q[i] > q[best]) best = i;
  return best;
}

int select_action(const Agent& agent, const env::Observation& obs, double eps,
                  Rng& rng) {
  if (!(eps >= 0.0 && eps <= 1.0))
    throw std::invalid_argument("epsilon must lie in [0, 1]");
  if (rng.uniform() < eps) return rng.uniform_int(0, 3);
  return greedy_action(agent.online, obs);
}

std::vector<double> compute_targets(std::span<const replay::Transition> batch,
                                    const nn::MlpParams& online,
                                    const nn::MlpParams& target, double gamma,
                                    TargetMode mode) {
  std::vector<double> ys;
  ys.reserve(batch.size());
  for (const auto& t : batch) {
    if (t.done) {
      ys.push_back(t.reward);
      continue;
    }
    Eigen::VectorXd qt = nn::forward(target, t.next_state);
    double bootstrap;
    if (mode == TargetMode::double_q) {
      bootstrap = qt[greedy_action(online, t.next_state)];
    } else {
      bootstrap = qt.maxCoeff();
    }
    ys.push_back(t.reward + gamma * bootstrap);
  }
  return ys;
}

double learn_step(Agent& agent, const replay::ReplayBuffer& buffer,
                  const AgentConfig& config, Rng& rng) {
  auto batch = config.sample_with_replacement
                   ? buffer.sample_with_replacement(config.batch_size, rng)
                   : buffer.sample(config.batch_size, rng);
  auto targets = compute_targets(batch, agent.online, agent.target,
                                 config.gamma, config.target_mode);

  std::vector<nn::TrainSample> samples;
  samples.reserve(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i)
    samples.push_back({batch[i].state, targets[i], batch[i].action});

  auto result = nn::batch_backward(agent.online, samples);
  nn::adamax_step(agent.online, result.grads, agent.opt,
                  config.learning_rate);
  return result.mean_loss;
}

bool maybe_sync_target(Agent& agent, const AgentConfig& config) {
  const long long c = config.target_sync_steps;
  if (agent.action_steps < c) return false;
  const long long window = agent.action_steps / c;
  const long long synced =
      agent.last_sync_step < 0 ? 0 : agent.last_sync_step / c;
  if (window <= synced) return false;
  agent.target = agent.online;
  agent.last_sync_step = agent.action_steps;
  return true;
}

}  // namespace landrl::agent
