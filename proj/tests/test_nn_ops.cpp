#include <doctest.h>

#include <cmath>

#include "mmhar/nn_ops.hpp"
#include "mmhar/params.hpp"

using namespace mmhar;

namespace {

Tensor randn(std::vector<std::int64_t> shape, Rng& rng, double scale = 1.0) {
  Tensor t(std::move(shape));
  for (auto& v : t.values()) v = scale * rng.normal();
  return t;
}

double sum_mul(const Tensor& y, const Tensor& weights) {
  double acc = 0.0;
  for (std::int64_t i = 0; i < y.numel(); ++i) acc += y[i] * weights[i];
  return acc;
}

/// Central-difference derivative of loss_fn w.r.t. t[i].
template <typename F>
double numeric_grad(Tensor& t, std::int64_t i, F&& loss_fn, double h = 1e-5) {
  const double saved = t[i];
  t[i] = saved + h;
  const double up = loss_fn();
  t[i] = saved - h;
  const double down = loss_fn();
  t[i] = saved;
  return (up - down) / (2 * h);
}

}  // namespace

TEST_CASE("conv1d forward matches a hand computation") {
  // single channel, kernel [1, 2], input [1, 2, 3]
  Tensor x({1, 1, 3}, {1, 2, 3});
  Tensor w({1, 1, 2}, {1, 2});
  Tensor b({1}, {0.5});
  const Tensor y = conv1d_valid_forward(x, w, b);
  REQUIRE(y.shape() == std::vector<std::int64_t>{1, 1, 2});
  CHECK(y[0] == doctest::Approx(1 * 1 + 2 * 2 + 0.5));
  CHECK(y[1] == doctest::Approx(2 * 1 + 3 * 2 + 0.5));
}

TEST_CASE("conv1d gradients match central differences") {
  Rng rng(1);
  Tensor x = randn({2, 3, 20}, rng);
  Tensor w = randn({4, 3, 5}, rng, 0.5);
  Tensor b = randn({4}, rng, 0.1);
  const Tensor weights = randn({2, 4, 16}, rng);

  auto loss = [&] { return sum_mul(conv1d_valid_forward(x, w, b), weights); };

  Tensor dx = Tensor::zeros(x.shape());
  Tensor dw = Tensor::zeros(w.shape());
  Tensor db = Tensor::zeros(b.shape());
  conv1d_valid_backward(x, w, weights, &dx, &dw, &db);

  for (std::int64_t i = 0; i < w.numel(); i += 7) {
    CHECK(dw[i] == doctest::Approx(numeric_grad(w, i, loss)).epsilon(1e-5));
  }
  for (std::int64_t i = 0; i < x.numel(); i += 13) {
    CHECK(dx[i] == doctest::Approx(numeric_grad(x, i, loss)).epsilon(1e-5));
  }
  CHECK(db[0] == doctest::Approx(numeric_grad(b, 0, loss)).epsilon(1e-5));
}

TEST_CASE("conv3d output dims and gradients") {
  const Conv3dGeom geom{{1, 2, 2}, {1, 1, 1}};
  const auto dims = conv3d_output_dims({4, 8, 8}, {3, 3, 3}, geom);
  CHECK(dims == std::array<std::int64_t, 3>{4, 4, 4});

  Rng rng(2);
  Tensor x = randn({2, 2, 3, 6, 6}, rng);
  Tensor w = randn({3, 2, 3, 3, 3}, rng, 0.3);
  Tensor b = randn({3}, rng, 0.1);
  const Tensor y = conv3d_forward(x, w, &b, geom);
  const Tensor weights = randn(y.shape(), rng);

  auto loss = [&] { return sum_mul(conv3d_forward(x, w, &b, geom), weights); };

  Tensor dx = Tensor::zeros(x.shape());
  Tensor dw = Tensor::zeros(w.shape());
  Tensor db = Tensor::zeros(b.shape());
  conv3d_backward(x, w, weights, geom, &dx, &dw, &db);

  for (std::int64_t i = 0; i < w.numel(); i += 17) {
    CHECK(dw[i] == doctest::Approx(numeric_grad(w, i, loss)).epsilon(1e-4));
  }
  for (std::int64_t i = 0; i < x.numel(); i += 41) {
    CHECK(dx[i] == doctest::Approx(numeric_grad(x, i, loss)).epsilon(1e-4));
  }
  for (std::int64_t i = 0; i < 3; ++i) {
    CHECK(db[i] == doctest::Approx(numeric_grad(b, i, loss)).epsilon(1e-4));
  }
}

TEST_CASE("maxpool3d forward/backward") {
  const Pool3dGeom geom{{2, 2, 2}, {2, 2, 2}, {0, 0, 0}};
  Rng rng(3);
  Tensor x = randn({1, 1, 2, 4, 4}, rng);
  const MaxPool3dResult res = maxpool3d_forward(x, geom);
  CHECK(res.y.shape() == std::vector<std::int64_t>{1, 1, 1, 2, 2});

  // every output equals the max of its window
  double expected = -1e30;
  for (std::int64_t t = 0; t < 2; ++t) {
    for (std::int64_t y = 0; y < 2; ++y) {
      for (std::int64_t z = 0; z < 2; ++z) expected = std::max(expected, x.at(0, 0, t, y, z));
    }
  }
  CHECK(res.y.at(0, 0, 0, 0, 0) == expected);

  Tensor dy = Tensor::full(res.y.shape(), 1.0);
  const Tensor dx = maxpool3d_backward(x, res, dy);
  double total = 0.0;
  for (double v : dx.values()) total += v;
  CHECK(total == doctest::Approx(static_cast<double>(res.y.numel())));
}

TEST_CASE("fixed-statistics batchnorm gradients") {
  Rng rng(4);
  Tensor x = randn({2, 3, 2, 2, 2}, rng);
  Tensor gamma = randn({3}, rng, 0.5);
  Tensor beta = randn({3}, rng, 0.5);
  Tensor mean = randn({3}, rng, 0.3);
  Tensor var = Tensor({3}, {0.5, 1.0, 2.0});
  const double eps = 1e-3;
  const Tensor weights = randn(x.shape(), rng);

  auto loss = [&] {
    return sum_mul(batchnorm_fixed_forward(x, gamma, beta, mean, var, eps), weights);
  };

  Tensor dx = Tensor::zeros(x.shape());
  Tensor dgamma = Tensor::zeros({3});
  Tensor dbeta = Tensor::zeros({3});
  batchnorm_fixed_backward(x, gamma, mean, var, eps, weights, &dx, &dgamma, &dbeta);

  for (std::int64_t i = 0; i < x.numel(); i += 11) {
    CHECK(dx[i] == doctest::Approx(numeric_grad(x, i, loss)).epsilon(1e-5));
  }
  for (std::int64_t i = 0; i < 3; ++i) {
    CHECK(dgamma[i] == doctest::Approx(numeric_grad(gamma, i, loss)).epsilon(1e-5));
    CHECK(dbeta[i] == doctest::Approx(numeric_grad(beta, i, loss)).epsilon(1e-5));
  }
}

TEST_CASE("linear layer gradients") {
  Rng rng(5);
  Tensor x = randn({4, 6}, rng);
  Tensor w = randn({3, 6}, rng, 0.4);
  Tensor b = randn({3}, rng, 0.1);
  const Tensor weights = randn({4, 3}, rng);

  auto loss = [&] { return sum_mul(linear_forward(x, w, b), weights); };

  Tensor dx = Tensor::zeros(x.shape());
  Tensor dw = Tensor::zeros(w.shape());
  Tensor db = Tensor::zeros(b.shape());
  linear_backward(x, w, weights, &dx, &dw, &db);

  for (std::int64_t i = 0; i < w.numel(); ++i) {
    CHECK(dw[i] == doctest::Approx(numeric_grad(w, i, loss)).epsilon(1e-6));
  }
  for (std::int64_t i = 0; i < x.numel(); ++i) {
    CHECK(dx[i] == doctest::Approx(numeric_grad(x, i, loss)).epsilon(1e-6));
  }
}

TEST_CASE("cross entropy values and gradient") {
  // uniform logits over C classes -> ln C
  for (int c : {2, 7, 27}) {
    Tensor logits({1, c});
    logits.fill(0.42);
    CHECK(softmax_cross_entropy(logits, {0}) ==
          doctest::Approx(std::log(static_cast<double>(c))).epsilon(1e-12));
  }

  // saturated true logit -> ~0 loss
  Tensor sat({1, 3}, {1000.0, 0.0, 0.0});
  CHECK(softmax_cross_entropy(sat, {0}) == doctest::Approx(0.0).epsilon(1e-9));

  // hand-computed: logits [1, 0], label 0 -> ln(1 + e^-1)
  Tensor two({1, 2}, {1.0, 0.0});
  CHECK(softmax_cross_entropy(two, {0}) ==
        doctest::Approx(std::log(1.0 + std::exp(-1.0))).epsilon(1e-12));

  CHECK_THROWS_AS(softmax_cross_entropy(two, {2}), Error);

  // gradient vs central differences
  Rng rng(6);
  Tensor logits = randn({5, 4}, rng);
  const std::vector<int> labels{0, 3, 1, 2, 2};
  Tensor dlogits;
  softmax_cross_entropy(logits, labels, &dlogits);
  auto loss = [&] { return softmax_cross_entropy(logits, labels); };
  for (std::int64_t i = 0; i < logits.numel(); ++i) {
    CHECK(dlogits[i] == doctest::Approx(numeric_grad(logits, i, loss)).epsilon(1e-5));
  }
}

TEST_CASE("softmax shift invariance") {
  Rng rng(7);
  Tensor logits = randn({3, 9}, rng);
  const std::vector<int> labels{1, 4, 8};
  const double base = softmax_cross_entropy(logits, labels);
  Tensor shifted = logits;
  for (std::int64_t i = 0; i < 3; ++i) {
    for (std::int64_t j = 0; j < 9; ++j) shifted.at(i, j) += 123.456;
  }
  CHECK(std::abs(softmax_cross_entropy(shifted, labels) - base) < 1e-9);
}

TEST_CASE("dropout mask statistics and scaling") {
  Rng rng(8);
  const Tensor mask = dropout_mask({10000}, 0.2, rng);
  std::int64_t kept = 0;
  for (double v : mask.values()) {
    CHECK((v == 0.0 || v == doctest::Approx(1.25)));
    if (v != 0.0) ++kept;
  }
  CHECK(kept > 7600);
  CHECK(kept < 8400);
  CHECK_THROWS(dropout_mask({4}, 1.0, rng));
}

TEST_CASE("relu and pooling behave") {
  Tensor x({1, 2, 3}, {-1, 0, 2, 3, -4, 5});
  const Tensor y = relu(x);
  CHECK(y.values() == std::vector<double>{0, 0, 2, 3, 0, 5});

  const Tensor pooled = global_avg_pool1d(x);
  CHECK(pooled.at(0, 0) == doctest::Approx((-1 + 0 + 2) / 3.0));
  CHECK(pooled.at(0, 1) == doctest::Approx((3 - 4 + 5) / 3.0));

  Tensor dfeat({1, 2}, {3.0, 6.0});
  const Tensor dx = global_avg_pool1d_backward(x, dfeat);
  CHECK(dx.at(0, 0, 1) == doctest::Approx(1.0));
  CHECK(dx.at(0, 1, 2) == doctest::Approx(2.0));
}

TEST_CASE("grad store respects trainability and buffers") {
  ModelParams params;
  auto& g1 = params.add_group("layer_a");
  g1.add("weight", Tensor({2, 2}));
  g1.add("bn/running_mean", Tensor({2}));
  auto& g2 = params.add_group("layer_b");
  g2.add("weight", Tensor({3}));
  g2.trainable = false;

  const ModelParams grads = make_grad_store(params);
  CHECK(grads.has_group("layer_a"));
  CHECK(!grads.has_group("layer_b"));
  CHECK(grads.group("layer_a").contains("weight"));
  CHECK(!grads.group("layer_a").contains("bn/running_mean"));
}
