#pragma once

#include <array>
#include <cstdint>

#include "mmhar/nn_ops.hpp"
#include "mmhar/params.hpp"

namespace mmhar {

/// Desk-scale video backbone: three 3-D convolution blocks (kernel 3x3x3,
/// spatial stride 2, padding 1) with rectifiers, then global average
/// pooling. Groups Block_1..Block_3; Block_2/Block_3 play the role of the
/// partially fine-tuned inner layers in desk-scale tests.
class Mini3dEncoder {
 public:
  Mini3dEncoder(std::array<int, 3> channels, std::array<std::int64_t, 3> input_shape);

  static const std::vector<std::string>& group_names();
  int feature_dim() const { return channels_[2]; }

  ModelParams init(std::uint64_t seed) const;

  struct Cache {
    std::array<Tensor, 3> conv_in;
    std::array<Tensor, 3> pre_relu;
    Tensor pooled_in;
  };

  Tensor forward(const ModelParams& params, const Tensor& batch, Cache* cache = nullptr) const;
  void backward(const ModelParams& params, const Cache& cache, const Tensor& dfeatures,
                ModelParams* grads) const;

 private:
  std::array<int, 3> channels_;
  std::array<std::int64_t, 3> input_shape_;
};

}  // namespace mmhar
