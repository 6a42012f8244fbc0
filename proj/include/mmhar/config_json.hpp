#pragma once

#include <nlohmann/json.hpp>

#include "mmhar/fusion.hpp"
#include "mmhar/imu_encoder.hpp"
#include "mmhar/video_encoder.hpp"

namespace mmhar {

inline void to_json(nlohmann::json& j, const ImuEncoderConfig& c) {
  j = {{"in_channels", c.in_channels},
       {"block_channels", c.block_channels},
       {"kernel_sizes", c.kernel_sizes},
       {"dropout_rate", c.dropout_rate},
       {"expected_input_length", c.expected_input_length}};
}

inline void from_json(const nlohmann::json& j, ImuEncoderConfig& c) {
  j.at("in_channels").get_to(c.in_channels);
  j.at("block_channels").get_to(c.block_channels);
  j.at("kernel_sizes").get_to(c.kernel_sizes);
  j.at("dropout_rate").get_to(c.dropout_rate);
  c.expected_input_length = j.value("expected_input_length", 0);
}

inline void to_json(nlohmann::json& j, const VideoEncoderConfig& c) {
  j = {{"backbone", to_string(c.backbone)},
       {"input_shape", c.input_shape},
       {"mini_channels", c.mini_channels},
       {"trainable_groups", c.trainable_groups},
       {"checkpoint_path", c.checkpoint_path}};
}

inline void from_json(const nlohmann::json& j, VideoEncoderConfig& c) {
  c.backbone = video_backbone_from_string(j.at("backbone"));
  j.at("input_shape").get_to(c.input_shape);
  j.at("mini_channels").get_to(c.mini_channels);
  j.at("trainable_groups").get_to(c.trainable_groups);
  c.checkpoint_path = j.value("checkpoint_path", std::string());
}

inline void to_json(nlohmann::json& j, const MlpHeadConfig& c) {
  j = {{"in_dim", c.in_dim}, {"hidden_dim", c.hidden_dim}, {"num_classes", c.num_classes}};
}

inline void from_json(const nlohmann::json& j, MlpHeadConfig& c) {
  j.at("in_dim").get_to(c.in_dim);
  j.at("hidden_dim").get_to(c.hidden_dim);
  j.at("num_classes").get_to(c.num_classes);
}

}  // namespace mmhar
