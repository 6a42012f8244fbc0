#include "mmhar/fusion.hpp"

#include <algorithm>

namespace mmhar {

void MlpHeadConfig::validate() const {
  if (in_dim < 1) throw ConfigError("mlp head: in_dim must be >= 1");
  if (hidden_dim < 1) throw ConfigError("mlp head: hidden_dim must be >= 1");
  if (num_classes < 2) throw ConfigError("mlp head: num_classes must be >= 2");
}

MlpHead::MlpHead(MlpHeadConfig config) : cfg_(config) { cfg_.validate(); }

const std::string& MlpHead::group_name() {
  static const std::string kName = "mlp_head";
  return kName;
}

ModelParams MlpHead::init(std::uint64_t seed) const {
  ModelParams params;
  ParamGroup& g = params.add_group(group_name());
  Rng rng1(derive_seed(seed, "mlp/fc1"));
  Rng rng2(derive_seed(seed, "mlp/fc2"));
  g.add("fc1/weight", uniform_fan_in_init({cfg_.hidden_dim, cfg_.in_dim}, cfg_.in_dim, rng1));
  g.add("fc1/bias", Tensor::zeros({cfg_.hidden_dim}));
  g.add("fc2/weight", uniform_fan_in_init({cfg_.num_classes, cfg_.hidden_dim}, cfg_.hidden_dim, rng2));
  g.add("fc2/bias", Tensor::zeros({cfg_.num_classes}));
  return params;
}

Tensor MlpHead::forward(const ModelParams& params, const Tensor& features, Cache* cache) const {
  if (features.rank() != 2 || features.dim(1) != cfg_.in_dim) {
    throw ShapeError("mlp head: features must be [N, " + std::to_string(cfg_.in_dim) + "], got " +
                     features.shape_string());
  }
  const ParamGroup& g = params.group(group_name());
  Tensor pre = linear_forward(features, g.at("fc1/weight"), g.at("fc1/bias"));
  Tensor hidden = relu(pre);
  Tensor logits = linear_forward(hidden, g.at("fc2/weight"), g.at("fc2/bias"));
  if (cache) {
    cache->input = features;
    cache->pre_relu = std::move(pre);
    cache->hidden = std::move(hidden);
  }
  return logits;
}

void MlpHead::backward(const ModelParams& params, const Cache& cache, const Tensor& dlogits,
                       ModelParams* grads, Tensor* dinput) const {
  const ParamGroup& g = params.group(group_name());

  Tensor dhidden = Tensor::zeros(cache.hidden.shape());
  Tensor* dw2 = grads ? grad_ptr(*grads, group_name(), "fc2/weight") : nullptr;
  Tensor* db2 = grads ? grad_ptr(*grads, group_name(), "fc2/bias") : nullptr;
  linear_backward(cache.hidden, g.at("fc2/weight"), dlogits, &dhidden, dw2, db2);

  Tensor dpre = relu_backward(cache.pre_relu, dhidden);

  Tensor dx;
  if (dinput) dx = Tensor::zeros(cache.input.shape());
  Tensor* dw1 = grads ? grad_ptr(*grads, group_name(), "fc1/weight") : nullptr;
  Tensor* db1 = grads ? grad_ptr(*grads, group_name(), "fc1/bias") : nullptr;
  linear_backward(cache.input, g.at("fc1/weight"), dpre, dinput ? &dx : nullptr, dw1, db1);
  if (dinput) *dinput = std::move(dx);
}

Tensor fuse_features(const Tensor& imu_features, const Tensor& video_features) {
  if (imu_features.rank() != 2 || video_features.rank() != 2) {
    throw ShapeError("fuse_features: inputs must be [N, d] matrices");
  }
  if (imu_features.dim(0) != video_features.dim(0)) {
    throw ShapeError("fuse_features: batch sizes differ (" + std::to_string(imu_features.dim(0)) +
                     " vs " + std::to_string(video_features.dim(0)) + ")");
  }
  const std::int64_t n = imu_features.dim(0);
  const std::int64_t d1 = imu_features.dim(1);
  const std::int64_t d2 = video_features.dim(1);
  Tensor fused({n, d1 + d2});
  for (std::int64_t i = 0; i < n; ++i) {
    std::copy(imu_features.data() + i * d1, imu_features.data() + (i + 1) * d1,
              fused.data() + i * (d1 + d2));
    std::copy(video_features.data() + i * d2, video_features.data() + (i + 1) * d2,
              fused.data() + i * (d1 + d2) + d1);
  }
  return fused;
}

void split_fused_gradient(const Tensor& dfused, std::int64_t imu_dim, Tensor* dimu,
                          Tensor* dvideo) {
  const std::int64_t n = dfused.dim(0);
  const std::int64_t total = dfused.dim(1);
  const std::int64_t d2 = total - imu_dim;
  if (dimu) *dimu = Tensor({n, imu_dim});
  if (dvideo) *dvideo = Tensor({n, d2});
  for (std::int64_t i = 0; i < n; ++i) {
    if (dimu) {
      std::copy(dfused.data() + i * total, dfused.data() + i * total + imu_dim,
                dimu->data() + i * imu_dim);
    }
    if (dvideo) {
      std::copy(dfused.data() + i * total + imu_dim, dfused.data() + (i + 1) * total,
                dvideo->data() + i * d2);
    }
  }
}

double cross_entropy_loss(const Tensor& logits, const std::vector<int>& labels) {
  return softmax_cross_entropy(logits, labels, nullptr);
}

}  // namespace mmhar
