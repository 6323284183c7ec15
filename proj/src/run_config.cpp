#include "landrl/run_config.hpp"

#include <fstream>
#include <initializer_list>
#include <utility>

#include "landrl/errors.hpp"

namespace landrl {

namespace {

using DoubleField = std::pair<const char*, double env::EnvConfig::*>;

constexpr std::initializer_list<DoubleField> kEnvDoubles = {
    {"dt", &env::EnvConfig::dt},
    {"gravity", &env::EnvConfig::gravity},
    {"main_accel", &env::EnvConfig::main_accel},
    {"side_torque", &env::EnvConfig::side_torque},
    {"side_accel", &env::EnvConfig::side_accel},
    {"init_x_range", &env::EnvConfig::init_x_range},
    {"init_y", &env::EnvConfig::init_y},
    {"init_vx_range", &env::EnvConfig::init_vx_range},
    {"init_vy_min", &env::EnvConfig::init_vy_min},
    {"init_vy_max", &env::EnvConfig::init_vy_max},
    {"init_theta_range", &env::EnvConfig::init_theta_range},
    {"init_omega_range", &env::EnvConfig::init_omega_range},
    {"leg_x", &env::EnvConfig::leg_x},
    {"leg_y", &env::EnvConfig::leg_y},
    {"pad_half_width", &env::EnvConfig::pad_half_width},
    {"crash_speed", &env::EnvConfig::crash_speed},
    {"crash_angle", &env::EnvConfig::crash_angle},
    {"land_speed", &env::EnvConfig::land_speed},
    {"land_omega", &env::EnvConfig::land_omega},
    {"bounds_x", &env::EnvConfig::bounds_x},
    {"main_engine_cost", &env::EnvConfig::main_engine_cost},
    {"side_engine_cost", &env::EnvConfig::side_engine_cost},
    {"leg_contact_bonus", &env::EnvConfig::leg_contact_bonus},
    {"crash_penalty", &env::EnvConfig::crash_penalty},
    {"land_bonus", &env::EnvConfig::land_bonus},
    {"shaping_position", &env::EnvConfig::shaping_position},
    {"shaping_velocity", &env::EnvConfig::shaping_velocity},
    {"shaping_angle", &env::EnvConfig::shaping_angle},
};

[[noreturn]] void unknown_key(const std::string& section,
                              const std::string& key) {
  throw ConfigError("unknown key \"" + key + "\" in \"" + section +
                    "\" section");
}

void read_agent(const nlohmann::json& j, agent::AgentConfig& a) {
  for (const auto& [key, value] : j.items()) {
    if (key == "gamma") a.gamma = value.get<double>();
    else if (key == "lambda") a.lambda = value.get<double>();
    else if (key == "episodes") a.episodes = value.get<int>();
    else if (key == "memory_capacity") a.memory_capacity = value.get<int>();
    else if (key == "batch_size") a.batch_size = value.get<int>();
    else if (key == "target_sync_steps")
      a.target_sync_steps = value.get<long long>();
    else if (key == "hidden1") a.hidden1 = value.get<int>();
    else if (key == "hidden2") a.hidden2 = value.get<int>();
    else if (key == "learning_rate") a.learning_rate = value.get<double>();
    else if (key == "target_mode")
      a.target_mode = agent::target_mode_from_string(value.get<std::string>());
    else if (key == "epsilon_basis")
      a.epsilon_basis =
          agent::epsilon_basis_from_string(value.get<std::string>());
    else if (key == "max_steps_per_episode")
      a.max_steps_per_episode = value.get<int>();
    else if (key == "sample_with_replacement")
      a.sample_with_replacement = value.get<bool>();
    else
      unknown_key("agent", key);
  }
}

void read_env(const nlohmann::json& j, env::EnvConfig& e) {
  for (const auto& [key, value] : j.items()) {
    if (key == "max_steps") {
      e.max_steps = value.get<int>();
      continue;
    }
    bool found = false;
    for (const auto& [name, member] : kEnvDoubles) {
      if (key == name) {
        e.*member = value.get<double>();
        found = true;
        break;
      }
    }
    if (!found) unknown_key("env", key);
  }
}

void read_run(const nlohmann::json& j, RunConfig& c) {
  for (const auto& [key, value] : j.items()) {
    if (key == "seeds") {
      c.seeds = value.get<std::vector<std::uint64_t>>();
      if (c.seeds.empty())
        throw ConfigError("run.seeds cannot be an empty list");
    } else if (key == "out_dir") {
      c.out_dir = value.get<std::string>();
    } else if (key == "eval_trials") {
      c.eval_trials = value.get<int>();
      if (c.eval_trials < 1)
        throw ConfigError("run.eval_trials must be >= 1");
    } else {
      unknown_key("run", key);
    }
  }
}

}  // namespace

RunConfig run_config_from_json(const nlohmann::json& j) {
  try {
    if (!j.is_object())
      throw ConfigError("run configuration must be a JSON object");
    RunConfig config;
    for (const auto& [key, value] : j.items()) {
      if (key == "agent") read_agent(value, config.agent);
      else if (key == "env") read_env(value, config.env);
      else if (key == "run") read_run(value, config);
      else unknown_key("top-level", key);
    }
    config.agent.validate();
    config.env.validate();
    return config;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed run configuration: ") + e.what());
  }
}

nlohmann::ordered_json to_json(const RunConfig& config) {
  nlohmann::ordered_json j;
  auto& a = j["agent"];
  a["gamma"] = config.agent.gamma;
  a["lambda"] = config.agent.lambda;
  a["episodes"] = config.agent.episodes;
  a["memory_capacity"] = config.agent.memory_capacity;
  a["batch_size"] = config.agent.batch_size;
  a["target_sync_steps"] = config.agent.target_sync_steps;
  a["hidden1"] = config.agent.hidden1;
  a["hidden2"] = config.agent.hidden2;
  a["learning_rate"] = config.agent.learning_rate;
  a["target_mode"] = std::string(agent::to_string(config.agent.target_mode));
  a["epsilon_basis"] =
      std::string(agent::to_string(config.agent.epsilon_basis));
  a["max_steps_per_episode"] = config.agent.max_steps_per_episode;
  a["sample_with_replacement"] = config.agent.sample_with_replacement;

  auto& e = j["env"];
  for (const auto& [name, member] : kEnvDoubles) e[name] = config.env.*member;
  e["max_steps"] = config.env.max_steps;

  auto& r = j["run"];
  r["seeds"] = config.seeds;
  r["out_dir"] = config.out_dir;
  r["eval_trials"] = config.eval_trials;
  return j;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path.string() + " is not valid JSON: " + e.what());
  }
  return run_config_from_json(j);
}

}  // namespace landrl
