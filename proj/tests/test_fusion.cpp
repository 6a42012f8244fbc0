#include <doctest.h>

#include <cmath>

#include "gradient_check.hpp"
#include "mmhar/fusion.hpp"

using namespace mmhar;

TEST_CASE("fuse_features concatenates row-wise") {
  Tensor a({1, 2}, {1, 2});
  Tensor b({1, 1}, {3});
  const Tensor fused = fuse_features(a, b);
  CHECK(fused.shape() == std::vector<std::int64_t>{1, 3});
  CHECK(fused.values() == std::vector<double>{1, 2, 3});

  Tensor wide_a({2, 256});
  Tensor wide_b({2, 1024});
  CHECK(fuse_features(wide_a, wide_b).dim(1) == 1280);

  Tensor mismatched({3, 2});
  CHECK_THROWS_AS(fuse_features(a, mismatched), ShapeError);
}

TEST_CASE("zero imu features leave the video suffix intact") {
  Tensor a = Tensor::zeros({2, 3});
  Tensor b({2, 2}, {5, 6, 7, 8});
  const Tensor fused = fuse_features(a, b);
  for (std::int64_t i = 0; i < 2; ++i) {
    for (std::int64_t j = 0; j < 3; ++j) CHECK(fused.at(i, j) == 0.0);
    CHECK(fused.at(i, 3) == b.at(i, 0));
    CHECK(fused.at(i, 4) == b.at(i, 1));
  }
}

TEST_CASE("fuse then slice recovers both inputs") {
  Rng rng(1);
  Tensor a({4, 5});
  Tensor b({4, 3});
  for (auto& v : a.values()) v = rng.normal();
  for (auto& v : b.values()) v = rng.normal();
  const Tensor fused = fuse_features(a, b);

  Tensor ra, rb;
  split_fused_gradient(fused, 5, &ra, &rb);
  CHECK(ra.values() == a.values());
  CHECK(rb.values() == b.values());
}

TEST_CASE("mlp head: hand-set weights match manual arithmetic") {
  MlpHeadConfig cfg{2, 2, 2};
  const MlpHead head(cfg);
  ModelParams params = head.init(0);
  params.param("mlp_head", "fc1/weight") = Tensor({2, 2}, {1, 0, 0, -1});
  params.param("mlp_head", "fc1/bias") = Tensor({2}, {0, 0.5});
  params.param("mlp_head", "fc2/weight") = Tensor({2, 2}, {1, 2, 3, 4});
  params.param("mlp_head", "fc2/bias") = Tensor({2}, {0.1, -0.1});

  Tensor x({1, 2}, {2, 3});
  // fc1: [2*1+3*0, 2*0+3*(-1)+0.5] = [2, -2.5]; relu -> [2, 0]
  // fc2: [2*1+0*2+0.1, 2*3+0*4-0.1] = [2.1, 5.9]
  const Tensor logits = head.forward(params, x);
  CHECK(logits.at(0, 0) == doctest::Approx(2.1));
  CHECK(logits.at(0, 1) == doctest::Approx(5.9));
}

TEST_CASE("mlp zero params give uniform softmax") {
  MlpHeadConfig cfg{3, 4, 5};
  const MlpHead head(cfg);
  ModelParams params = head.init(0);
  for (const auto& name : {"fc1/weight", "fc1/bias", "fc2/weight", "fc2/bias"}) {
    params.param("mlp_head", name).fill(0.0);
  }
  Tensor x({2, 3}, {1, 2, 3, 4, 5, 6});
  const Tensor logits = head.forward(params, x);
  for (double v : logits.values()) CHECK(v == 0.0);
  CHECK(cross_entropy_loss(logits, {0, 4}) == doctest::Approx(std::log(5.0)));
}

TEST_CASE("mlp batch shape and width mismatch") {
  MlpHeadConfig cfg{6, 4, 3};
  const MlpHead head(cfg);
  const ModelParams params = head.init(1);
  Rng rng(2);
  Tensor x({7, 6});
  for (auto& v : x.values()) v = rng.normal();
  CHECK(head.forward(params, x).shape() == std::vector<std::int64_t>{7, 3});

  Tensor bad({7, 5});
  CHECK_THROWS_AS(head.forward(params, bad), ShapeError);
}

TEST_CASE("mlp head gradient check") {
  MlpHeadConfig cfg{5, 4, 3};
  const MlpHead head(cfg);
  ModelParams params = head.init(3);

  Rng rng(4);
  Tensor x({6, 5});
  for (auto& v : x.values()) v = rng.normal();
  const std::vector<int> labels{0, 1, 2, 0, 1, 2};

  MlpHead::Cache cache;
  const Tensor logits = head.forward(params, x, &cache);
  Tensor dlogits;
  softmax_cross_entropy(logits, labels, &dlogits);
  ModelParams grads = make_grad_store(params);
  head.backward(params, cache, dlogits, &grads);

  auto loss = [&] { return softmax_cross_entropy(head.forward(params, x), labels); };
  const auto stats = mmhar::testing::check_gradients(params, grads, loss, 1e-4, 1e-3);
  CHECK(stats.pass_fraction() >= 0.95);

  // gradient also flows to the inputs
  Tensor dx;
  head.backward(params, cache, dlogits, nullptr, &dx);
  bool any_nonzero = false;
  for (double v : dx.values()) any_nonzero |= v != 0.0;
  CHECK(any_nonzero);
}

TEST_CASE("cross entropy loss examples and bounds") {
  Tensor uniform({1, 27});
  uniform.fill(0.0);
  CHECK(cross_entropy_loss(uniform, {13}) == doctest::Approx(std::log(27.0)).epsilon(1e-9));

  Tensor confident({1, 4}, {1000, 0, 0, 0});
  CHECK(cross_entropy_loss(confident, {0}) < 1e-9);
  CHECK(cross_entropy_loss(confident, {0}) >= 0.0);

  Tensor pair({1, 2}, {1, 0});
  CHECK(cross_entropy_loss(pair, {0}) == doctest::Approx(0.31326168751822286).epsilon(1e-10));
}
