#pragma once

#include "mmhar/data_types.hpp"

namespace mmhar {

/// Linear-interpolation resampling to target_rate_hz. The output length is
/// round(len * target/source); a target equal to the source rate is an
/// identity copy.
SensorSequence resample_sensor(const SensorSequence& seq, double target_rate_hz);

/// Zero-pads short sequences at the tail; crops long ones to the first
/// target_len steps.
SensorSequence pad_or_crop(const SensorSequence& seq, std::int64_t target_len);

/// Temporal stride selection at target_fps, then crop or last-frame repeat to
/// exactly num_frames.
VideoClip sample_video_frames(const VideoClip& clip, double target_fps, std::int64_t num_frames);

/// Bilinear spatial resize of every frame.
VideoClip resize_clip(const VideoClip& clip, std::int64_t height, std::int64_t width);

/// Canonical per-dataset input geometry.
struct PreprocessConfig {
  double sensor_rate_hz = 50.0;
  std::int64_t sensor_len = 160;
  double video_fps = 15.0;
  std::int64_t video_frames = 32;
  std::int64_t video_height = 224;
  std::int64_t video_width = 224;

  std::string cache_key() const;
};

SensorSequence preprocess_sensor(const SensorSequence& raw, const PreprocessConfig& cfg);
VideoClip preprocess_video(const VideoClip& raw, const PreprocessConfig& cfg);

}  // namespace mmhar
