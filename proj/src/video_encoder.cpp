#include "mmhar/video_encoder.hpp"

#include <algorithm>

#include "mmhar/npz.hpp"

namespace mmhar {

std::string to_string(VideoBackbone b) { return b == VideoBackbone::kS3d ? "S3D" : "MINI3D"; }

VideoBackbone video_backbone_from_string(const std::string& name) {
  if (name == "S3D" || name == "s3d") return VideoBackbone::kS3d;
  if (name == "MINI3D" || name == "mini3d") return VideoBackbone::kMini3d;
  throw ConfigError("unknown video backbone '" + name + "' (expected S3D or MINI3D)");
}

int VideoEncoderConfig::feature_dim() const {
  return backbone == VideoBackbone::kS3d ? S3dEncoder::kFeatureDim : mini_channels[2];
}

void VideoEncoderConfig::validate() const {
  const std::vector<std::string>& declared = backbone == VideoBackbone::kS3d
                                                 ? S3dEncoder().group_names()
                                                 : Mini3dEncoder::group_names();
  for (const auto& g : trainable_groups) {
    if (std::find(declared.begin(), declared.end(), g) == declared.end()) {
      std::string valid;
      for (const auto& name : declared) valid += (valid.empty() ? "" : ", ") + name;
      throw ConfigError("video encoder: trainable group '" + g +
                        "' is not declared by " + to_string(backbone) + " (valid: " + valid + ")");
    }
  }
  if (backbone == VideoBackbone::kS3d &&
      (input_shape[0] < 8 || input_shape[1] < 32 || input_shape[2] < 32)) {
    throw ConfigError("video encoder: S3D input must be at least 8 x 32 x 32");
  }
}

VideoEncoder::VideoEncoder(VideoEncoderConfig config)
    : cfg_(std::move(config)),
      mini_(cfg_.mini_channels, cfg_.input_shape),
      s3d_() {
  cfg_.validate();
}

const std::vector<std::string>& VideoEncoder::group_names() const {
  return cfg_.backbone == VideoBackbone::kS3d ? s3d_.group_names() : Mini3dEncoder::group_names();
}

ModelParams VideoEncoder::init(std::uint64_t seed) const {
  return cfg_.backbone == VideoBackbone::kS3d ? s3d_.init(seed) : mini_.init(seed);
}

Tensor VideoEncoder::forward(const ModelParams& params, const Tensor& batch, Cache* cache) const {
  if (cfg_.backbone == VideoBackbone::kS3d) {
    return s3d_.forward(params, batch, cache ? &cache->s3d : nullptr);
  }
  return mini_.forward(params, batch, cache ? &cache->mini : nullptr);
}

void VideoEncoder::backward(const ModelParams& params, const Cache& cache,
                            const Tensor& dfeatures, ModelParams* grads) const {
  if (cfg_.backbone == VideoBackbone::kS3d) {
    s3d_.backward(params, cache.s3d, dfeatures, grads);
  } else {
    mini_.backward(params, cache.mini, dfeatures, grads);
  }
}

TrainabilityMask set_trainable_layers(ModelParams& params,
                                      const std::vector<std::string>& group_names,
                                      const std::vector<std::string>& declared_groups) {
  for (const auto& g : group_names) {
    if (std::find(declared_groups.begin(), declared_groups.end(), g) == declared_groups.end()) {
      std::string valid;
      for (const auto& name : declared_groups) valid += (valid.empty() ? "" : ", ") + name;
      throw Error("set_trainable_layers: unknown group '" + g + "' (valid: " + valid + ")");
    }
  }
  TrainabilityMask mask;
  for (const auto& name : declared_groups) {
    const bool trainable =
        std::find(group_names.begin(), group_names.end(), name) != group_names.end();
    params.group(name).trainable = trainable;
    mask[name] = trainable;
  }
  return mask;
}

ModelParams load_pretrained_video_weights(const std::string& path,
                                          const VideoEncoderConfig& config) {
  config.validate();
  const VideoEncoder encoder(config);
  ModelParams params = encoder.init(0);

  const NpzArchive archive = NpzArchive::load(path);
  for (const auto& gname : params.group_order) {
    ParamGroup& g = params.group(gname);
    for (const auto& pname : g.order) {
      const std::string key = gname + "/" + pname;
      if (!archive.contains(key)) {
        throw LoadError("video checkpoint '" + path + "': group '" + gname +
                        "' is missing array '" + pname + "'");
      }
      const NamedArray& arr = archive.at(key);
      Tensor& dst = g.at(pname);
      if (arr.shape != dst.shape()) {
        throw LoadError("video checkpoint '" + path + "': group '" + gname + "' array '" + pname +
                        "' has shape " + Tensor::shape_string(arr.shape) + ", expected " +
                        dst.shape_string());
      }
      dst = arr.tensor();
    }
  }

  set_trainable_layers(params, config.trainable_groups, encoder.group_names());
  return params;
}

}  // namespace mmhar
