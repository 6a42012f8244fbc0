#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mmhar/nn_ops.hpp"
#include "mmhar/params.hpp"

namespace mmhar {

/// Separable-3D-convolution video classification backbone (inception-style
/// blocks Mixed_3b..Mixed_5c, separable temporal/spatial convolutions,
/// fixed-statistics batch norm). Produces a 1024-dim globally pooled
/// feature. Checkpoints use the named-array archive produced by
/// tools/convert_s3d_weights.py.
class S3dEncoder {
 public:
  S3dEncoder();
  ~S3dEncoder();
  S3dEncoder(const S3dEncoder&);
  S3dEncoder(S3dEncoder&&) noexcept;
  S3dEncoder& operator=(const S3dEncoder&);
  S3dEncoder& operator=(S3dEncoder&&) noexcept;

  static constexpr int kFeatureDim = 1024;

  const std::vector<std::string>& group_names() const;

  ModelParams init(std::uint64_t seed) const;

  struct ConvBnCache {
    Tensor conv_in;
    Tensor conv_out;  // pre-normalization
    Tensor bn_out;    // pre-rectifier
  };

  struct StageCache {
    std::vector<ConvBnCache> cbs;
    MaxPool3dResult pool;
    Tensor input;
    std::vector<std::int64_t> branch_channels;
  };

  struct Cache {
    std::vector<StageCache> stages;
    Tensor pooled_in;
  };

  /// batch is [N, 3, T, H, W] with T >= 8 and H, W >= 32.
  Tensor forward(const ModelParams& params, const Tensor& batch, Cache* cache = nullptr) const;
  void backward(const ModelParams& params, const Cache& cache, const Tensor& dfeatures,
                ModelParams* grads) const;

 private:
  struct Stage;
  std::vector<Stage> stages_;
  std::vector<std::string> group_names_;
};

}  // namespace mmhar
