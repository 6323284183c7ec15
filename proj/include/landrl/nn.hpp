#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace landrl::nn {

enum class Activation { relu, tanh, linear };

std::string_view to_string(Activation a);
Activation activation_from_string(std::string_view s);  // throws ConfigError

// Widths of every layer (input first) plus one activation per non-input
// layer. The default Q-network stack is {8, h1, h2, 4} with
// {relu, tanh, linear}.
struct LayerSpec {
  std::vector<int> sizes;
  std::vector<Activation> activations;

  int input_size() const { return sizes.front(); }
  int output_size() const { return sizes.back(); }
  // Number of weight layers (non-input).
  int depth() const { return static_cast<int>(sizes.size()) - 1; }

  void validate() const;  // throws ConfigError

  bool operator==(const LayerSpec&) const = default;
};

// Dense weights and biases for one network. weights[l] is
// sizes[l+1] x sizes[l]; biases[l] has sizes[l+1] entries. Plain value
// type: copies are deep and independent.
struct MlpParams {
  LayerSpec spec;
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;

  bool all_finite() const;
};

// Same shape as the parameters it differentiates.
struct GradientSet {
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;

  static GradientSet zeros_like(const MlpParams& p);
  bool all_finite() const;
};

// Adamax accumulators. u tracks a decayed infinity norm of the gradient,
// so all its entries stay >= 0; t counts optimizer steps.
struct AdamaxState {
  GradientSet m;
  GradientSet u;
  long long t = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon_div = 1e-8;

  static AdamaxState fresh(const MlpParams& p, double beta1 = 0.9,
                           double beta2 = 0.999, double epsilon_div = 1e-8);
};

// One supervised sample for the masked squared-error objective: only the
// output unit at `action` carries a target.
struct TrainSample {
  Eigen::VectorXd input;
  double target = 0.0;
  int action = 0;
};

// Uniform Glorot-style init: weights ~ U[-sqrt(6/(fan_in+fan_out)), +...],
// biases zero. Deterministic in seed.
MlpParams init_params(const LayerSpec& spec, std::uint64_t seed);

// Layer-by-layer activation(W h + b); the final layer's activation tag is
// applied as given (linear means none).
Eigen::VectorXd forward(const MlpParams& params,
                        const Eigen::Ref<const Eigen::VectorXd>& input);

// All post-activation vectors, input first, output last. Entry 0 is a copy
// of the input; entry depth() is what forward() returns.
std::vector<Eigen::VectorXd> forward_trace(
    const MlpParams& params, const Eigen::Ref<const Eigen::VectorXd>& input);

// Exact gradient of (target - output[action])^2 in every weight and bias.
// Output rows for other actions receive zero gradient directly; they feel
// the sample only through shared hidden layers.
GradientSet backward(const MlpParams& params,
                     const Eigen::Ref<const Eigen::VectorXd>& input,
                     double target, int action);

// Mean of per-sample gradients over a non-empty batch.
GradientSet batch_gradient(const MlpParams& params,
                           std::span<const TrainSample> batch);

// Batch gradient plus the pre-update mean loss from the same forward pass.
struct BatchBackwardResult {
  GradientSet grads;
  double mean_loss = 0.0;
};
BatchBackwardResult batch_backward(const MlpParams& params,
                                   std::span<const TrainSample> batch);

// t += 1; m <- b1 m + (1-b1) g; u <- max(b2 u, |g|);
// theta -= (lr/(1-b1^t)) * m / max(u, eps). Rejects non-finite gradients
// without touching params or state.
void adamax_step(MlpParams& params, const GradientSet& grads,
                 AdamaxState& state, double lr);

// Plain theta -= lr * g. Debugging baseline.
void sgd_step(MlpParams& params, const GradientSet& grads, double lr);

}  // namespace landrl::nn
