#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <vector>

#include "landrl/errors.hpp"
#include "landrl/nn.hpp"
#include "landrl/rng.hpp"

using namespace landrl;
using Eigen::VectorXd;

namespace {

nn::LayerSpec spec_of(std::vector<int> sizes,
                      std::vector<nn::Activation> acts) {
  return nn::LayerSpec{std::move(sizes), std::move(acts)};
}

nn::LayerSpec default_stack(int in, int h1, int h2, int out) {
  return spec_of({in, h1, h2, out}, {nn::Activation::relu, nn::Activation::tanh,
                                     nn::Activation::linear});
}

double masked_loss(const nn::MlpParams& p, const VectorXd& x, double target,
                   int action) {
  const double r = target - nn::forward(p, x)[action];
  return r * r;
}

// Central finite differences over every parameter; the independent oracle
// for backward().
bool gradients_match_fd(const nn::MlpParams& p, const VectorXd& x,
                        double target, int action, double h = 1e-5,
                        double rel_tol = 1e-4, double abs_floor = 1e-7) {
  const nn::GradientSet g = nn::backward(p, x, target, action);
  auto check = [&](double analytic, double fd) {
    const double scale = std::max(std::abs(analytic), std::abs(fd));
    return std::abs(analytic - fd) <= std::max(rel_tol * scale, abs_floor);
  };
  for (int l = 0; l < p.spec.depth(); ++l) {
    for (int r = 0; r < p.weights[l].rows(); ++r) {
      for (int c = 0; c < p.weights[l].cols(); ++c) {
        nn::MlpParams plus = p, minus = p;
        plus.weights[l](r, c) += h;
        minus.weights[l](r, c) -= h;
        const double fd = (masked_loss(plus, x, target, action) -
                           masked_loss(minus, x, target, action)) /
                          (2 * h);
        if (!check(g.weights[l](r, c), fd)) return false;
      }
    }
    for (int r = 0; r < p.biases[l].size(); ++r) {
      nn::MlpParams plus = p, minus = p;
      plus.biases[l][r] += h;
      minus.biases[l][r] -= h;
      const double fd = (masked_loss(plus, x, target, action) -
                         masked_loss(minus, x, target, action)) /
                        (2 * h);
      if (!check(g.biases[l][r], fd)) return false;
    }
  }
  return true;
}

nn::MlpParams random_params(const nn::LayerSpec& spec, std::uint64_t seed) {
  return nn::init_params(spec, seed);
}

VectorXd random_vector(int n, Rng& rng) {
  VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = rng.uniform(-1.5, 1.5);
  return v;
}

}  // namespace

TEST_CASE("layer spec validation") {
  CHECK_THROWS_AS(spec_of({8}, {}).validate(), ConfigError);
  CHECK_THROWS_AS(
      spec_of({8, 0, 4}, {nn::Activation::relu, nn::Activation::linear})
          .validate(),
      ConfigError);
  CHECK_THROWS_AS(spec_of({8, 4}, {}).validate(), ConfigError);
  CHECK_NOTHROW(default_stack(8, 128, 256, 4).validate());
}

TEST_CASE("init_params zero biases and determinism") {
  const auto spec = default_stack(8, 128, 256, 4);
  const auto p = nn::init_params(spec, 7);
  for (const auto& b : p.biases) CHECK(b.isZero(0.0));

  const auto q = nn::init_params(spec, 7);
  for (int l = 0; l < spec.depth(); ++l) {
    CHECK(p.weights[l] == q.weights[l]);
    CHECK(p.biases[l] == q.biases[l]);
  }

  const auto r = nn::init_params(spec, 8);
  CHECK(p.weights[0] != r.weights[0]);
}

TEST_CASE("init_params respects the fan bound") {
  const auto spec = spec_of({1, 1}, {nn::Activation::linear});
  const double bound = std::sqrt(3.0);  // sqrt(6 / (1 + 1))
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto p = nn::init_params(spec, seed);
    CHECK(std::abs(p.weights[0](0, 0)) <= bound);
  }
}

TEST_CASE("forward on zero parameters") {
  auto p = random_params(default_stack(8, 16, 16, 4), 1);
  for (auto& w : p.weights) w.setZero();
  const VectorXd x = VectorXd::Constant(8, 0.37);
  CHECK(nn::forward(p, x).isZero(0.0));

  p.biases[2] << 1, 2, 3, 4;
  const VectorXd out = nn::forward(p, x);
  CHECK(out[0] == 1.0);
  CHECK(out[1] == 2.0);
  CHECK(out[2] == 3.0);
  CHECK(out[3] == 4.0);
}

TEST_CASE("forward against per-neuron arithmetic") {
  auto p = random_params(default_stack(1, 4, 4, 2), 3);
  for (auto& w : p.weights) w.setConstant(0.1);
  for (auto& b : p.biases) b.setZero();
  VectorXd x(1);
  x << 1.0;
  const VectorXd out = nn::forward(p, x);

  // One unit at a time: relu(0.1*1) per first-layer unit, tanh of the 0.1
  // weighted sum of four of those, then the 0.1-weighted sum of four tanhs.
  const double h1 = std::max(0.0, 0.1 * 1.0);
  const double h2 = std::tanh(4 * 0.1 * h1);
  const double expected = 4 * 0.1 * h2;
  CHECK(out[0] == doctest::Approx(expected).epsilon(1e-12));
  CHECK(out[1] == doctest::Approx(expected).epsilon(1e-12));
  CHECK(out[0] == doctest::Approx(0.015991).epsilon(1e-4));
}

TEST_CASE("forward is pure") {
  const auto p = random_params(default_stack(8, 24, 12, 4), 11);
  Rng rng(5);
  for (int i = 0; i < 20; ++i) {
    const VectorXd x = random_vector(8, rng);
    const VectorXd a = nn::forward(p, x);
    const VectorXd b = nn::forward(p, x);
    CHECK(a == b);
  }
}

TEST_CASE("forward rejects bad input sizes") {
  const auto p = random_params(default_stack(8, 4, 4, 4), 2);
  CHECK_THROWS_AS(nn::forward(p, VectorXd::Zero(7)), ShapeError);
  CHECK_THROWS_AS(
      nn::forward(p, VectorXd::Constant(
                         8, std::numeric_limits<double>::quiet_NaN())),
      NumericError);
}

TEST_CASE("hidden activation ranges") {
  Rng rng(77);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto p = random_params(default_stack(8, 32, 16, 4), seed);
    const VectorXd x = random_vector(8, rng);
    const auto trace = nn::forward_trace(p, x);
    REQUIRE(trace.size() == 4);
    CHECK(trace[1].minCoeff() >= 0.0);            // relu layer
    CHECK(trace[2].maxCoeff() < 1.0);             // tanh layer
    CHECK(trace[2].minCoeff() > -1.0);
  }
}

TEST_CASE("backward zero-residual cases") {
  auto p = random_params(default_stack(4, 6, 6, 3), 9);
  for (auto& w : p.weights) w.setZero();
  for (auto& b : p.biases) b.setZero();
  const auto g0 = nn::backward(p, VectorXd::Constant(4, 0.5), 0.0, 1);
  for (const auto& gw : g0.weights) CHECK(gw.isZero(0.0));
  for (const auto& gb : g0.biases) CHECK(gb.isZero(0.0));

  const auto q = random_params(default_stack(4, 6, 6, 3), 10);
  Rng rng(21);
  const VectorXd x = random_vector(4, rng);
  const double target = nn::forward(q, x)[2];
  const auto g1 = nn::backward(q, x, target, 2);
  for (const auto& gw : g1.weights) CHECK(gw.isZero(0.0));
  for (const auto& gb : g1.biases) CHECK(gb.isZero(0.0));
}

TEST_CASE("backward masks non-selected output rows") {
  const auto p = random_params(default_stack(3, 5, 5, 4), 13);
  Rng rng(31);
  const VectorXd x = random_vector(3, rng);
  const auto g = nn::backward(p, x, 0.7, 2);
  const auto& out_w = g.weights.back();
  const auto& out_b = g.biases.back();
  for (int a = 0; a < 4; ++a) {
    if (a == 2) {
      CHECK(out_w.row(a).cwiseAbs().maxCoeff() > 0.0);
    } else {
      CHECK(out_w.row(a).isZero(0.0));
      CHECK(out_b[a] == 0.0);
    }
  }
}

TEST_CASE("backward matches central finite differences") {
  Rng rng(123);
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const auto spec = (seed % 2 == 0) ? default_stack(2, 3, 3, 2)
                                      : default_stack(3, 5, 5, 4);
    const auto p = random_params(spec, 1000 + seed);
    const VectorXd x = random_vector(spec.input_size(), rng);
    const double target = rng.uniform(-2.0, 2.0);
    const int action = rng.uniform_int(0, spec.output_size() - 1);
    CHECK(gradients_match_fd(p, x, target, action));
  }
}

TEST_CASE("batch_gradient reductions") {
  const auto spec = default_stack(3, 6, 4, 4);
  const auto p = random_params(spec, 17);
  Rng rng(41);

  nn::TrainSample s1{random_vector(3, rng), 0.9, 1};
  nn::TrainSample s2{random_vector(3, rng), -0.4, 3};

  SUBCASE("batch of one equals backward") {
    const auto g = nn::batch_gradient(p, std::vector{s1});
    const auto b = nn::backward(p, s1.input, s1.target, s1.action);
    for (int l = 0; l < spec.depth(); ++l) {
      CHECK(g.weights[l] == b.weights[l]);
      CHECK(g.biases[l] == b.biases[l]);
    }
  }

  SUBCASE("duplicate samples equal the single gradient") {
    const auto g = nn::batch_gradient(p, std::vector{s1, s1});
    const auto b = nn::backward(p, s1.input, s1.target, s1.action);
    for (int l = 0; l < spec.depth(); ++l) {
      CHECK(g.weights[l].isApprox(b.weights[l], 1e-12));
      CHECK(g.biases[l].isApprox(b.biases[l], 1e-12));
    }
  }

  SUBCASE("two samples average the per-sample gradients") {
    const auto g = nn::batch_gradient(p, std::vector{s1, s2});
    const auto b1 = nn::backward(p, s1.input, s1.target, s1.action);
    const auto b2 = nn::backward(p, s2.input, s2.target, s2.action);
    for (int l = 0; l < spec.depth(); ++l) {
      const Eigen::MatrixXd mean_w = (b1.weights[l] + b2.weights[l]) / 2.0;
      const Eigen::VectorXd mean_b = (b1.biases[l] + b2.biases[l]) / 2.0;
      CHECK(g.weights[l].isApprox(mean_w, 1e-12));
      CHECK(g.biases[l].isApprox(mean_b, 1e-12));
    }
  }

  SUBCASE("empty batch is rejected") {
    CHECK_THROWS_AS(nn::batch_gradient(p, std::vector<nn::TrainSample>{}),
                    std::invalid_argument);
  }
}

TEST_CASE("adamax scalar recurrences") {
  // Single-weight network so the recurrence can be followed by hand.
  auto p = random_params(spec_of({1, 1}, {nn::Activation::linear}), 0);
  p.weights[0](0, 0) = 1.0;
  p.biases[0][0] = 0.0;
  auto st = nn::AdamaxState::fresh(p);
  auto g = nn::GradientSet::zeros_like(p);

  SUBCASE("zero gradient leaves parameters in place") {
    nn::adamax_step(p, g, st, 0.002);
    CHECK(p.weights[0](0, 0) == 1.0);
    CHECK(st.t == 1);
  }

  SUBCASE("first step follows m, u, theta by hand") {
    g.weights[0](0, 0) = 0.5;
    nn::adamax_step(p, g, st, 0.002);
    CHECK(st.m.weights[0](0, 0) == doctest::Approx(0.05).epsilon(1e-14));
    CHECK(st.u.weights[0](0, 0) == doctest::Approx(0.5).epsilon(1e-14));
    // theta' = 1 - (0.002 / (1 - 0.9)) * (0.05 / 0.5)
    CHECK(p.weights[0](0, 0) == doctest::Approx(0.998).epsilon(1e-14));
  }

  SUBCASE("u takes the decayed max") {
    g.weights[0](0, 0) = 0.5;
    nn::adamax_step(p, g, st, 0.002);
    g.weights[0](0, 0) = 0.25;
    nn::adamax_step(p, g, st, 0.002);
    CHECK(st.u.weights[0](0, 0) ==
          doctest::Approx(0.4995).epsilon(1e-14));  // max(0.999*0.5, 0.25)
    CHECK(st.t == 2);
  }

  SUBCASE("non-finite gradients are rejected without touching state") {
    g.weights[0](0, 0) = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(nn::adamax_step(p, g, st, 0.002), NumericError);
    CHECK(p.weights[0](0, 0) == 1.0);
    CHECK(st.t == 0);
  }
}

TEST_CASE("adamax step magnitude stays within the bias-corrected rate") {
  auto p = random_params(spec_of({1, 1}, {nn::Activation::linear}), 0);
  p.weights[0](0, 0) = 0.3;
  auto st = nn::AdamaxState::fresh(p);
  auto g = nn::GradientSet::zeros_like(p);
  g.weights[0](0, 0) = -0.37;
  const double lr = 0.01;
  for (int t = 1; t <= 200; ++t) {
    const double before = p.weights[0](0, 0);
    nn::adamax_step(p, g, st, lr);
    const double step = std::abs(p.weights[0](0, 0) - before);
    const double bound = lr / (1.0 - std::pow(0.9, t));
    CHECK(step <= bound * (1 + 1e-12));
    // Constant gradient: the magnitude is exactly lr after bias correction.
    CHECK(step == doctest::Approx(lr).epsilon(1e-12));
  }
}

TEST_CASE("params copies are deep and independent") {
  const auto spec = default_stack(8, 12, 12, 4);
  const auto src = random_params(spec, 23);
  nn::MlpParams copy = src;

  Rng rng(51);
  for (int i = 0; i < 100; ++i) {
    const VectorXd x = random_vector(8, rng);
    CHECK(nn::forward(src, x) == nn::forward(copy, x));
  }

  nn::MlpParams mutated = src;
  mutated.weights[0](0, 0) += 1.0;
  const VectorXd probe = random_vector(8, rng);
  CHECK(nn::forward(mutated, probe) != nn::forward(src, probe));
  CHECK(nn::forward(copy, probe) == nn::forward(src, probe));

  const nn::MlpParams copy2 = copy;
  CHECK(nn::forward(copy2, probe) == nn::forward(src, probe));
}

TEST_CASE("sgd step is a plain scaled subtraction") {
  auto p = random_params(spec_of({2, 2}, {nn::Activation::linear}), 5);
  auto g = nn::GradientSet::zeros_like(p);
  g.weights[0].setConstant(2.0);
  g.biases[0].setConstant(-1.0);
  const Eigen::MatrixXd w_before = p.weights[0];
  const Eigen::VectorXd b_before = p.biases[0];
  nn::sgd_step(p, g, 0.1);
  CHECK(p.weights[0].isApprox(w_before - Eigen::MatrixXd::Constant(2, 2, 0.2),
                              1e-15));
  CHECK(p.biases[0].isApprox(b_before + Eigen::VectorXd::Constant(2, 0.1),
                             1e-15));
}
