#include "mmhar/data_types.hpp"

#include <unordered_set>

namespace mmhar {

std::string to_string(Modality m) { return m == Modality::kImu ? "IMU" : "VIDEO"; }

Modality modality_from_string(const std::string& name) {
  if (name == "IMU" || name == "imu") return Modality::kImu;
  if (name == "VIDEO" || name == "video" || name == "RGB" || name == "rgb") return Modality::kVideo;
  throw Error("unknown modality '" + name + "' (expected IMU or VIDEO)");
}

std::string to_string(SplitTag tag) { return tag == SplitTag::kTrain ? "TRAIN" : "TEST"; }

void validate(const SensorSequence& seq) {
  if (seq.values.rank() != 2) throw Error("SensorSequence: values must be [channels x timesteps]");
  if (seq.channels() < 1 || seq.timesteps() < 1) {
    throw Error("SensorSequence: needs at least one channel and one timestep");
  }
  if (seq.sample_rate_hz <= 0.0) throw Error("SensorSequence: sample_rate_hz must be positive");
  if (!seq.values.all_finite()) throw Error("SensorSequence: non-finite values");
}

void validate(const VideoClip& clip) {
  if (clip.frames.rank() != 4 || clip.frames.dim(3) != 3) {
    throw Error("VideoClip: frames must be [time x height x width x 3]");
  }
  if (clip.time() < 1) throw Error("VideoClip: needs at least one frame");
  if (clip.frame_rate_hz <= 0.0) throw Error("VideoClip: frame_rate_hz must be positive");
  for (double v : clip.frames.values()) {
    if (!(v >= 0.0 && v <= 1.0)) throw Error("VideoClip: pixel values must lie in [0,1]");
  }
}

void validate(const DatasetIndex& index) {
  std::unordered_set<std::string> ids;
  ids.reserve(index.samples.size());
  for (const auto& s : index.samples) {
    if (!ids.insert(s.sample_id).second) {
      throw Error("DatasetIndex: duplicate sample_id '" + s.sample_id + "'");
    }
    if (s.class_id < 0 || s.class_id >= index.num_classes) {
      throw Error("DatasetIndex: sample '" + s.sample_id + "' has class_id " +
                  std::to_string(s.class_id) + " outside [0, " +
                  std::to_string(index.num_classes) + ")");
    }
    if (!s.has_sensor() && !s.has_video()) {
      throw Error("DatasetIndex: sample '" + s.sample_id + "' has no modality");
    }
  }
  if (!index.class_names.empty() &&
      static_cast<int>(index.class_names.size()) != index.num_classes) {
    throw Error("DatasetIndex: class_names size disagrees with num_classes");
  }
}

}  // namespace mmhar
