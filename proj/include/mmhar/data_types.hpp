#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mmhar/errors.hpp"
#include "mmhar/tensor.hpp"

namespace mmhar {

enum class Modality { kImu, kVideo };

std::string to_string(Modality m);
Modality modality_from_string(const std::string& name);

/// Which modalities a sample may supply during a given training phase.
struct ModalitySet {
  bool imu = true;
  bool video = true;

  bool contains(Modality m) const { return m == Modality::kImu ? imu : video; }
  void remove(Modality m) { (m == Modality::kImu ? imu : video) = false; }
  void add(Modality m) { (m == Modality::kImu ? imu : video) = true; }
  bool operator==(const ModalitySet&) const = default;
};

/// Multivariate IMU time series, [channels x timesteps].
struct SensorSequence {
  Tensor values;
  double sample_rate_hz = 0.0;
  std::vector<std::string> channel_names;

  std::int64_t channels() const { return values.rank() == 2 ? values.dim(0) : 0; }
  std::int64_t timesteps() const { return values.rank() == 2 ? values.dim(1) : 0; }
};

void validate(const SensorSequence& seq);

/// RGB frame stack, [time x height x width x 3], pixels in [0,1].
struct VideoClip {
  Tensor frames;
  double frame_rate_hz = 0.0;

  std::int64_t time() const { return frames.rank() == 4 ? frames.dim(0) : 0; }
  std::int64_t height() const { return frames.rank() == 4 ? frames.dim(1) : 0; }
  std::int64_t width() const { return frames.rank() == 4 ? frames.dim(2) : 0; }
};

void validate(const VideoClip& clip);

enum class SplitTag { kTrain, kTest };

std::string to_string(SplitTag tag);

struct LabeledSample {
  std::string sample_id;
  int subject_id = 0;
  int class_id = 0;

  // In-memory payloads (synthetic data, or materialized file-backed samples).
  std::optional<SensorSequence> sensor;
  std::optional<VideoClip> video;

  // File-backed sources, decoded on demand. Empty for in-memory samples.
  std::string sensor_path;
  std::vector<std::string> extra_sensor_paths;  // additional streams to stack (MMAct)
  std::string video_path;

  ModalitySet modality_mask;

  bool has_sensor() const { return sensor.has_value() || !sensor_path.empty(); }
  bool has_video() const { return video.has_value() || !video_path.empty(); }
  bool has(Modality m) const { return m == Modality::kImu ? has_sensor() : has_video(); }

  /// Present and permitted by the mask.
  bool eligible(Modality m) const { return has(m) && modality_mask.contains(m); }
};

struct DatasetIndex {
  std::vector<LabeledSample> samples;
  int num_classes = 0;
  std::vector<std::string> class_names;
  SplitTag split = SplitTag::kTrain;

  std::size_t size() const { return samples.size(); }
};

/// Checks index invariants: unique sample ids, class ids in range, at least
/// one modality per sample. Throws Error on violation.
void validate(const DatasetIndex& index);

}  // namespace mmhar
