#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "landrl/env.hpp"
#include "landrl/nn.hpp"
#include "landrl/replay.hpp"
#include "landrl/rng.hpp"

namespace landrl::agent {

// double_q: bootstrap with the target net evaluated at the online net's
// argmax. max_q: plain max over the target net.
enum class TargetMode { double_q, max_q };
enum class EpsilonBasis { episode, step };

std::string_view to_string(TargetMode m);
TargetMode target_mode_from_string(std::string_view s);
std::string_view to_string(EpsilonBasis b);
EpsilonBasis epsilon_basis_from_string(std::string_view s);

// Every knob of the learner. Defaults are the best settings found for the
// lander task.
struct AgentConfig {
  double gamma = 0.99;
  double lambda = 0.5;  // epsilon scale, in (0, 1]
  int episodes = 1000;
  int memory_capacity = 120000;
  int batch_size = 64;
  long long target_sync_steps = 1200;
  int hidden1 = 128;
  int hidden2 = 256;
  double learning_rate = 0.002;
  TargetMode target_mode = TargetMode::double_q;
  EpsilonBasis epsilon_basis = EpsilonBasis::episode;
  int max_steps_per_episode = 1000;
  bool sample_with_replacement = false;

  nn::LayerSpec layer_spec() const;  // {8, hidden1, hidden2, 4}
  void validate() const;             // throws ConfigError

  bool operator==(const AgentConfig&) const = default;
};

// Online and target networks plus optimizer state. The two networks always
// share one LayerSpec, and right after construction or a sync they agree on
// every input.
struct Agent {
  nn::MlpParams online;
  nn::MlpParams target;
  nn::AdamaxState opt;
  long long action_steps = 0;  // global, across episodes
  int episode_index = 1;
  long long last_sync_step = -1;

  static Agent make(const AgentConfig& config, std::uint64_t seed);
};

// lambda / sqrt(n), capped at 1 (so n = 0 saturates). Negative n is invalid.
double epsilon(long long n, double lambda);

// Greedy argmax with ties broken toward the lowest index.
int greedy_action(const nn::MlpParams& params, const env::Observation& obs);

// With probability eps a uniform action, otherwise greedy on the online net.
int select_action(const Agent& agent, const env::Observation& obs, double eps,
                  Rng& rng);

// One bootstrap target per transition: r for terminal samples, otherwise
// r + gamma * (per mode above).
std::vector<double> compute_targets(std::span<const replay::Transition> batch,
                                    const nn::MlpParams& online,
                                    const nn::MlpParams& target, double gamma,
                                    TargetMode mode);

// Samples a batch, computes targets, and applies one Adamax update to the
// online net. Returns the pre-update mean loss. The target net is left
// untouched.
double learn_step(Agent& agent, const replay::ReplayBuffer& buffer,
                  const AgentConfig& config, Rng& rng);

// Copies online into target once the action-step counter enters a cadence
// window no earlier sync has covered (with one call per step that means
// exactly at positive multiples of target_sync_steps). Returns whether it
// copied.
bool maybe_sync_target(Agent& agent, const AgentConfig& config);

}  // namespace landrl::agent
