#include "landrl/nn.hpp"

#include <cmath>
#include <string>

#include "landrl/errors.hpp"
#include "landrl/rng.hpp"

namespace landrl::nn {

namespace {

void apply_activation(Activation a, Eigen::MatrixXd& z) {
  switch (a) {
    case Activation::relu:
      z = z.cwiseMax(0.0);
      break;
    case Activation::tanh:
      z = z.array().tanh();
      break;
    case Activation::linear:
      break;
  }
}

// Derivative from the post-activation value: relu keeps 1 where the output
// is positive, tanh uses 1 - h^2, linear is 1.
Eigen::MatrixXd activation_derivative(Activation a, const Eigen::MatrixXd& h) {
  switch (a) {
    case Activation::relu:
      return (h.array() > 0.0).cast<double>();
    case Activation::tanh:
      return 1.0 - h.array().square();
    case Activation::linear:
      return Eigen::MatrixXd::Ones(h.rows(), h.cols());
  }
  return {};
}

void check_input(const MlpParams& params,
                 const Eigen::Ref<const Eigen::VectorXd>& input) {
  if (input.size() != params.spec.input_size())
    throw ShapeError("input has " + std::to_string(input.size()) +
                     " entries, spec expects " +
                     std::to_string(params.spec.input_size()));
  if (!input.allFinite()) throw NumericError("non-finite network input");
}

}  // namespace

std::string_view to_string(Activation a) {
  switch (a) {
    case Activation::relu: return "relu";
    case Activation::tanh: return "tanh";
    case Activation::linear: return "linear";
  }
  return "?";
}

Activation activation_from_string(std::string_view s) {
  if (s == "relu") return Activation::relu;
  if (s == "tanh") return Activation::tanh;
  if (s == "linear") return Activation::linear;
  throw ConfigError("unknown activation '" + std::string(s) + "'");
}

void LayerSpec::validate() const {
  if (sizes.size() < 2)
    throw ConfigError("layer spec needs an input and an output layer");
  for (int s : sizes)
    if (s < 1) throw ConfigError("layer widths must be >= 1");
  if (activations.size() != sizes.size() - 1)
    throw ConfigError("expected one activation per non-input layer");
}

bool MlpParams::all_finite() const {
  for (const auto& w : weights)
    if (!w.allFinite()) return false;
  for (const auto& b : biases)
    if (!b.allFinite()) return false;
  return true;
}

GradientSet GradientSet::zeros_like(const MlpParams& p) {
  GradientSet g;
  g.weights.reserve(p.weights.size());
  g.biases.reserve(p.biases.size());
  for (const auto& w : p.weights)
    g.weights.push_back(Eigen::MatrixXd::Zero(w.rows(), w.cols()));
  for (const auto& b : p.biases)
    g.biases.push_back(Eigen::VectorXd::Zero(b.size()));
  return g;
}

bool GradientSet::all_finite() const {
  for (const auto& w : weights)
    if (!w.allFinite()) return false;
  for (const auto& b : biases)
    if (!b.allFinite()) return false;
  return true;
}

AdamaxState AdamaxState::fresh(const MlpParams& p, double beta1, double beta2,
                               double epsilon_div) {
  AdamaxState st;
  st.m = GradientSet::zeros_like(p);
  st.u = GradientSet::zeros_like(p);
  st.beta1 = beta1;
  st.beta2 = beta2;
  st.epsilon_div = epsilon_div;
  return st;
}

MlpParams init_params(const LayerSpec& spec, std::uint64_t seed) {
  spec.validate();
  MlpParams p;
  p.spec = spec;
  Rng rng(seed);
  for (int l = 0; l < spec.depth(); ++l) {
    const int fan_in = spec.sizes[l];
    const int fan_out = spec.sizes[l + 1];
    const double bound = std::sqrt(6.0 / (fan_in + fan_out));
    Eigen::MatrixXd w(fan_out, fan_in);
    for (int r = 0; r < fan_out; ++r)
      for (int c = 0; c < fan_in; ++c) w(r, c) = rng.uniform(-bound, bound);
    p.weights.push_back(std::move(w));
    p.biases.push_back(Eigen::VectorXd::Zero(fan_out));
  }
  return p;
}

Eigen::VectorXd forward(const MlpParams& params,
                        const Eigen::Ref<const Eigen::VectorXd>& input) {
  check_input(params, input);
  Eigen::MatrixXd h = input;
  for (int l = 0; l < params.spec.depth(); ++l) {
    Eigen::MatrixXd z = params.weights[l] * h + params.biases[l];
    apply_activation(params.spec.activations[l], z);
    if (!z.allFinite()) throw NumericError("non-finite layer activation");
    h = std::move(z);
  }
  return h.col(0);
}

std::vector<Eigen::VectorXd> forward_trace(
    const MlpParams& params, const Eigen::Ref<const Eigen::VectorXd>& input) {
  check_input(params, input);
  std::vector<Eigen::VectorXd> trace;
  trace.reserve(params.spec.sizes.size());
  trace.emplace_back(input);
  for (int l = 0; l < params.spec.depth(); ++l) {
    Eigen::MatrixXd z = params.weights[l] * trace.back() + params.biases[l];
    apply_activation(params.spec.activations[l], z);
    if (!z.allFinite()) throw NumericError("non-finite layer activation");
    trace.emplace_back(z.col(0));
  }
  return trace;
}

BatchBackwardResult batch_backward(const MlpParams& params,
                                   std::span<const TrainSample> batch) {
  if (batch.empty()) throw std::invalid_argument("empty training batch");
  const int depth = params.spec.depth();
  const int in = params.spec.input_size();
  const int out = params.spec.output_size();
  const int n = static_cast<int>(batch.size());

  Eigen::MatrixXd inputs(in, n);
  for (int j = 0; j < n; ++j) {
    if (batch[j].input.size() != in)
      throw ShapeError("sample input width does not match the input layer");
    if (batch[j].action < 0 || batch[j].action >= out)
      throw ShapeError("sample action outside the output layer");
    inputs.col(j) = batch[j].input;
  }

  // Forward, keeping every post-activation block.
  std::vector<Eigen::MatrixXd> h(depth + 1);
  h[0] = std::move(inputs);
  for (int l = 0; l < depth; ++l) {
    Eigen::MatrixXd z =
        (params.weights[l] * h[l]).colwise() + params.biases[l];
    apply_activation(params.spec.activations[l], z);
    h[l + 1] = std::move(z);
  }

  // Masked squared-error delta at the output; the 1/n of the batch mean is
  // folded in here so the backward pass emits mean gradients directly.
  Eigen::MatrixXd delta = Eigen::MatrixXd::Zero(out, n);
  double loss = 0.0;
  for (int j = 0; j < n; ++j) {
    const double predicted = h[depth](batch[j].action, j);
    const double residual = batch[j].target - predicted;
    loss += residual * residual;
    delta(batch[j].action, j) = 2.0 * (predicted - batch[j].target) / n;
  }
  loss /= n;
  if (params.spec.activations[depth - 1] != Activation::linear)
    delta = delta.cwiseProduct(
        activation_derivative(params.spec.activations[depth - 1], h[depth]));

  BatchBackwardResult result;
  result.mean_loss = loss;
  result.grads.weights.resize(depth);
  result.grads.biases.resize(depth);
  for (int l = depth - 1; l >= 0; --l) {
    result.grads.weights[l] = delta * h[l].transpose();
    result.grads.biases[l] = delta.rowwise().sum();
    if (l > 0)
      delta = (params.weights[l].transpose() * delta)
                  .cwiseProduct(activation_derivative(
                      params.spec.activations[l - 1], h[l]));
  }
  return result;
}

GradientSet backward(const MlpParams& params,
                     const Eigen::Ref<const Eigen::VectorXd>& input,
                     double target, int action) {
  check_input(params, input);
  TrainSample sample{input, target, action};
  return batch_backward(params, std::span<const TrainSample>(&sample, 1))
      .grads;
}

GradientSet batch_gradient(const MlpParams& params,
                           std::span<const TrainSample> batch) {
  return batch_backward(params, batch).grads;
}

void adamax_step(MlpParams& params, const GradientSet& grads,
                 AdamaxState& state, double lr) {
  if (lr <= 0.0) throw std::invalid_argument("learning rate must be > 0");
  if (grads.weights.size() != params.weights.size() ||
      grads.biases.size() != params.biases.size())
    throw ShapeError("gradient layer count does not match the parameters");
  for (std::size_t l = 0; l < params.weights.size(); ++l) {
    if (grads.weights[l].rows() != params.weights[l].rows() ||
        grads.weights[l].cols() != params.weights[l].cols() ||
        grads.biases[l].size() != params.biases[l].size())
      throw ShapeError("gradient shape does not match the parameters");
  }
  if (!grads.all_finite())
    throw NumericError("non-finite gradient; update rejected");

  state.t += 1;
  const double rate = lr / (1.0 - std::pow(state.beta1, state.t));
  auto update = [&](auto& theta, auto& m, auto& u, const auto& g) {
    m = state.beta1 * m + (1.0 - state.beta1) * g;
    u = (state.beta2 * u).cwiseMax(g.cwiseAbs());
    theta.array() -= rate * m.array() / u.array().max(state.epsilon_div);
  };
  for (std::size_t l = 0; l < params.weights.size(); ++l) {
    update(params.weights[l], state.m.weights[l], state.u.weights[l],
           grads.weights[l]);
    update(params.biases[l], state.m.biases[l], state.u.biases[l],
           grads.biases[l]);
  }
}

void sgd_step(MlpParams& params, const GradientSet& grads, double lr) {
  if (lr <= 0.0) throw std::invalid_argument("learning rate must be > 0");
  if (!grads.all_finite())
    throw NumericError("non-finite gradient; update rejected");
  for (std::size_t l = 0; l < params.weights.size(); ++l) {
    params.weights[l] -= lr * grads.weights[l];
    params.biases[l] -= lr * grads.biases[l];
  }
}

}  // namespace landrl::nn
