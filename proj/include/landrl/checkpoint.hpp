#pragma once

#include <filesystem>

#include <json.hpp>

#include "landrl/nn.hpp"

namespace landrl::checkpoint {

// On-disk snapshot of a learner: online network, target network, Adamax
// state, and the global action-step counter. JSON with round-trip float
// formatting, so save/load preserves forward outputs bit for bit.
//
// Schema (version 1):
//   {
//     "version": 1,
//     "sizes": [8, 128, 256, 4],
//     "activations": ["relu", "tanh", "linear"],
//     "weights":  [[...row-major layer 0...], ...],   // online net
//     "biases":   [[...], ...],
//     "adamax": {
//       "m": {"weights": [[...]...], "biases": [[...]...]},
//       "u": {"weights": [[...]...], "biases": [[...]...]},
//       "t": 0, "beta1": 0.9, "beta2": 0.999, "epsilon_div": 1e-8
//     },
//     "steps": 0,
//     "target": {"weights": [[...]...], "biases": [[...]...]}  // optional
//   }
// A file without "target" loads with target = online.
struct AgentCheckpoint {
  nn::MlpParams online;
  nn::MlpParams target;
  nn::AdamaxState opt;
  long long steps = 0;
};

nlohmann::ordered_json to_json(const AgentCheckpoint& ckpt);
AgentCheckpoint from_json(const nlohmann::json& j);  // throws ConfigError

void save(const std::filesystem::path& path, const AgentCheckpoint& ckpt);
AgentCheckpoint load(const std::filesystem::path& path);  // throws IoError/ConfigError

}  // namespace landrl::checkpoint
