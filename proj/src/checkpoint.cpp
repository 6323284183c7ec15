#include "landrl/checkpoint.hpp"

#include <fstream>
#include <string>
#include <vector>

#include "landrl/errors.hpp"

namespace landrl::checkpoint {

namespace {

constexpr int kVersion = 1;

nlohmann::ordered_json flatten(const Eigen::MatrixXd& m) {
  auto arr = nlohmann::ordered_json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) arr.push_back(m(r, c));
  return arr;
}

nlohmann::ordered_json flatten(const Eigen::VectorXd& v) {
  auto arr = nlohmann::ordered_json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

template <typename Layers>
nlohmann::ordered_json layer_arrays(const Layers& layers) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& l : layers) arr.push_back(flatten(l));
  return arr;
}

Eigen::MatrixXd unflatten_matrix(const nlohmann::json& arr, int rows,
                                 int cols, const std::string& what) {
  if (!arr.is_array() ||
      static_cast<Eigen::Index>(arr.size()) !=
          static_cast<Eigen::Index>(rows) * cols)
    throw ConfigError(what + " must hold " + std::to_string(rows * cols) +
                      " numbers");
  Eigen::MatrixXd m(rows, cols);
  Eigen::Index k = 0;
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = arr[k++].get<double>();
  return m;
}

Eigen::VectorXd unflatten_vector(const nlohmann::json& arr, int size,
                                 const std::string& what) {
  if (!arr.is_array() || static_cast<int>(arr.size()) != size)
    throw ConfigError(what + " must hold " + std::to_string(size) +
                      " numbers");
  Eigen::VectorXd v(size);
  for (int i = 0; i < size; ++i) v[i] = arr[i].get<double>();
  return v;
}

// Reads {"weights": [...], "biases": [...]} shaped like spec.
void read_layers(const nlohmann::json& j, const nn::LayerSpec& spec,
                 const std::string& what,
                 std::vector<Eigen::MatrixXd>& weights,
                 std::vector<Eigen::VectorXd>& biases) {
  const auto& jw = j.at("weights");
  const auto& jb = j.at("biases");
  if (!jw.is_array() || static_cast<int>(jw.size()) != spec.depth())
    throw ConfigError(what + ".weights must hold one array per layer");
  if (!jb.is_array() || static_cast<int>(jb.size()) != spec.depth())
    throw ConfigError(what + ".biases must hold one array per layer");
  weights.clear();
  biases.clear();
  for (int l = 0; l < spec.depth(); ++l) {
    const int rows = spec.sizes[l + 1];
    const int cols = spec.sizes[l];
    weights.push_back(unflatten_matrix(
        jw[l], rows, cols, what + ".weights[" + std::to_string(l) + "]"));
    biases.push_back(unflatten_vector(
        jb[l], rows, what + ".biases[" + std::to_string(l) + "]"));
  }
}

nn::MlpParams read_params(const nlohmann::json& j, const nn::LayerSpec& spec,
                          const std::string& what) {
  nn::MlpParams p;
  p.spec = spec;
  read_layers(j, spec, what, p.weights, p.biases);
  if (!p.all_finite())
    throw ConfigError(what + " holds a non-finite parameter");
  return p;
}

}  // namespace

nlohmann::ordered_json to_json(const AgentCheckpoint& ckpt) {
  nlohmann::ordered_json j;
  j["version"] = kVersion;
  j["sizes"] = ckpt.online.spec.sizes;
  auto acts = nlohmann::ordered_json::array();
  for (auto a : ckpt.online.spec.activations)
    acts.push_back(std::string(nn::to_string(a)));
  j["activations"] = acts;
  j["weights"] = layer_arrays(ckpt.online.weights);
  j["biases"] = layer_arrays(ckpt.online.biases);
  j["adamax"] = {
      {"m",
       {{"weights", layer_arrays(ckpt.opt.m.weights)},
        {"biases", layer_arrays(ckpt.opt.m.biases)}}},
      {"u",
       {{"weights", layer_arrays(ckpt.opt.u.weights)},
        {"biases", layer_arrays(ckpt.opt.u.biases)}}},
      {"t", ckpt.opt.t},
      {"beta1", ckpt.opt.beta1},
      {"beta2", ckpt.opt.beta2},
      {"epsilon_div", ckpt.opt.epsilon_div},
  };
  j["steps"] = ckpt.steps;
  j["target"] = {{"weights", layer_arrays(ckpt.target.weights)},
                 {"biases", layer_arrays(ckpt.target.biases)}};
  return j;
}

AgentCheckpoint from_json(const nlohmann::json& j) {
  try {
    if (!j.contains("version") || j.at("version") != kVersion)
      throw ConfigError("checkpoint version must be 1");

    nn::LayerSpec spec;
    spec.sizes = j.at("sizes").get<std::vector<int>>();
    for (const auto& name : j.at("activations"))
      spec.activations.push_back(
          nn::activation_from_string(name.get<std::string>()));
    spec.validate();

    AgentCheckpoint ckpt;
    ckpt.online = read_params(j, spec, "online");

    const auto& ja = j.at("adamax");
    ckpt.opt.m = nn::GradientSet::zeros_like(ckpt.online);
    ckpt.opt.u = nn::GradientSet::zeros_like(ckpt.online);
    read_layers(ja.at("m"), spec, "adamax.m", ckpt.opt.m.weights,
                ckpt.opt.m.biases);
    read_layers(ja.at("u"), spec, "adamax.u", ckpt.opt.u.weights,
                ckpt.opt.u.biases);
    if (!ckpt.opt.m.all_finite() || !ckpt.opt.u.all_finite())
      throw ConfigError("adamax state holds a non-finite value");
    ckpt.opt.t = ja.at("t").get<long long>();
    if (ckpt.opt.t < 0) throw ConfigError("adamax.t cannot be negative");
    ckpt.opt.beta1 = ja.at("beta1").get<double>();
    ckpt.opt.beta2 = ja.at("beta2").get<double>();
    ckpt.opt.epsilon_div = ja.at("epsilon_div").get<double>();

    ckpt.steps = j.at("steps").get<long long>();
    if (ckpt.steps < 0) throw ConfigError("steps cannot be negative");

    if (j.contains("target"))
      ckpt.target = read_params(j.at("target"), spec, "target");
    else
      ckpt.target = ckpt.online;
    ckpt.target.spec = spec;
    return ckpt;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed checkpoint: ") + e.what());
  }
}

void save(const std::filesystem::path& path, const AgentCheckpoint& ckpt) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << to_json(ckpt).dump() << '\n';
  if (!out) throw IoError("write to " + path.string() + " failed");
}

AgentCheckpoint load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path.string() + " is not valid JSON: " + e.what());
  }
  return from_json(j);
}

}  // namespace landrl::checkpoint
