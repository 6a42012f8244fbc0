#pragma once

#include <cstdint>
#include <vector>

#include "mmhar/nn_ops.hpp"
#include "mmhar/params.hpp"

namespace mmhar {

/// Two linear layers with one rectifier between them.
struct MlpHeadConfig {
  int in_dim = 0;
  int hidden_dim = 512;
  int num_classes = 0;

  void validate() const;
};

class MlpHead {
 public:
  explicit MlpHead(MlpHeadConfig config);

  const MlpHeadConfig& config() const { return cfg_; }
  static const std::string& group_name();

  ModelParams init(std::uint64_t seed) const;

  struct Cache {
    Tensor input;
    Tensor pre_relu;
    Tensor hidden;
  };

  /// features [N, in_dim] -> logits [N, num_classes].
  Tensor forward(const ModelParams& params, const Tensor& features, Cache* cache = nullptr) const;
  /// Accumulates head gradients; returns d(features) when dinput is set.
  void backward(const ModelParams& params, const Cache& cache, const Tensor& dlogits,
                ModelParams* grads, Tensor* dinput = nullptr) const;

 private:
  MlpHeadConfig cfg_;
};

/// Row-wise concatenation: output row i is imu row i followed by video row i.
Tensor fuse_features(const Tensor& imu_features, const Tensor& video_features);

/// Splits a fused gradient back into the two feature blocks.
void split_fused_gradient(const Tensor& dfused, std::int64_t imu_dim, Tensor* dimu,
                          Tensor* dvideo);

/// Mean cross-entropy; see softmax_cross_entropy for the gradient variant.
double cross_entropy_loss(const Tensor& logits, const std::vector<int>& labels);

}  // namespace mmhar
