#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "mmhar/mini3d.hpp"
#include "mmhar/params.hpp"
#include "mmhar/s3d.hpp"

namespace mmhar {

enum class VideoBackbone { kS3d, kMini3d };

std::string to_string(VideoBackbone b);
VideoBackbone video_backbone_from_string(const std::string& name);

/// One forward contract over two backbones: the full S3D network for
/// full-scale runs and the small 3-D CNN for desk-scale runs. Both expose
/// named layer groups so partial fine-tuning is enforceable.
struct VideoEncoderConfig {
  VideoBackbone backbone = VideoBackbone::kMini3d;
  std::array<std::int64_t, 3> input_shape{8, 32, 32};  // time, height, width
  std::array<int, 3> mini_channels{8, 16, 32};
  std::vector<std::string> trainable_groups;  // stage-2 fine-tuning set
  std::string checkpoint_path;

  int feature_dim() const;
  void validate() const;
};

/// group name -> trainable flag; covers every group exactly once.
using TrainabilityMask = std::map<std::string, bool>;

class VideoEncoder {
 public:
  explicit VideoEncoder(VideoEncoderConfig config);

  const VideoEncoderConfig& config() const { return cfg_; }
  const std::vector<std::string>& group_names() const;
  int feature_dim() const { return cfg_.feature_dim(); }

  /// Random fan-in initialization, deterministic per seed; all groups
  /// trainable.
  ModelParams init(std::uint64_t seed) const;

  struct Cache {
    Mini3dEncoder::Cache mini;
    S3dEncoder::Cache s3d;
  };

  /// batch is [N, 3, T, H, W]; returns [N, feature_dim]. Both backbones are
  /// deterministic in training and eval mode (no dropout).
  Tensor forward(const ModelParams& params, const Tensor& batch, Cache* cache = nullptr) const;
  void backward(const ModelParams& params, const Cache& cache, const Tensor& dfeatures,
                ModelParams* grads) const;

 private:
  VideoEncoderConfig cfg_;
  Mini3dEncoder mini_;
  S3dEncoder s3d_;
};

/// Marks exactly the named groups trainable and freezes the rest. Unknown
/// names raise an error listing the valid ones.
TrainabilityMask set_trainable_layers(ModelParams& params,
                                      const std::vector<std::string>& group_names,
                                      const std::vector<std::string>& declared_groups);

/// Loads a named-array checkpoint onto the backbone's declared structure;
/// every declared array must be present with the declared shape (errors name
/// the offending group). Trainability follows config.trainable_groups.
ModelParams load_pretrained_video_weights(const std::string& path,
                                          const VideoEncoderConfig& config);

}  // namespace mmhar
