#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "landrl/agent.hpp"
#include "landrl/env.hpp"

namespace landrl {

// The JSON run configuration: {"agent": {...}, "env": {...}, "run": {...}}.
// Every key is optional and defaults to the values below; unknown keys are
// rejected so typos cannot silently fall back to defaults.
struct RunConfig {
  agent::AgentConfig agent;
  env::EnvConfig env;
  std::vector<std::uint64_t> seeds{1};
  std::string out_dir = "out";
  int eval_trials = 100;

  bool operator==(const RunConfig&) const = default;
};

RunConfig run_config_from_json(const nlohmann::json& j);  // throws ConfigError
nlohmann::ordered_json to_json(const RunConfig& config);  // full echo

RunConfig load_run_config(const std::filesystem::path& path);

}  // namespace landrl
