#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "mmhar/nn_ops.hpp"
#include "mmhar/params.hpp"

namespace mmhar {

/// Three 1-D convolution blocks (conv -> dropout -> relu), kernel sizes
/// 24/16/8, followed by global average pooling over time.
struct ImuEncoderConfig {
  int in_channels = 6;
  std::array<int, 3> block_channels{64, 128, 256};
  std::array<int, 3> kernel_sizes{24, 16, 8};
  double dropout_rate = 0.2;
  /// When set (> 0), init verifies a window of this length survives all
  /// three valid convolutions.
  int expected_input_length = 0;

  int feature_dim() const { return block_channels[2]; }
  /// Shortest input accepted by the forward pass (all valid convolutions
  /// nonempty): k1 + k2 + k3 - 2.
  int min_input_length() const { return kernel_sizes[0] + kernel_sizes[1] + kernel_sizes[2] - 2; }

  void validate() const;
};

class ImuEncoder {
 public:
  explicit ImuEncoder(ImuEncoderConfig config);

  const ImuEncoderConfig& config() const { return cfg_; }

  static const std::vector<std::string>& group_names();

  ModelParams init(std::uint64_t seed) const;

  struct Cache {
    Tensor input;
    std::array<Tensor, 3> conv_in;    // input to each block's convolution
    std::array<Tensor, 3> pre_drop;   // convolution output
    std::array<Tensor, 3> drop_mask;  // empty in eval mode
    std::array<Tensor, 3> pre_relu;   // after dropout
    Tensor pooled_in;                 // final block activation [N,C,L]
  };

  /// batch is [N, in_channels, L]; returns features [N, feature_dim].
  Tensor forward(const ModelParams& params, const Tensor& batch, bool training_mode,
                 Rng* dropout_rng = nullptr, Cache* cache = nullptr) const;

  /// Accumulates parameter gradients into grads; returns d(batch) if
  /// dinput is non-null.
  void backward(const ModelParams& params, const Cache& cache, const Tensor& dfeatures,
                ModelParams* grads, Tensor* dinput = nullptr) const;

  /// Temporal lengths after each block for a given input length
  /// (L - k + 1 per block), e.g. 160 -> {137, 122, 115}.
  std::vector<std::int64_t> output_lengths(std::int64_t input_length) const;

 private:
  ImuEncoderConfig cfg_;
};

}  // namespace mmhar
