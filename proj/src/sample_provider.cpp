#include "mmhar/sample_provider.hpp"

#include <filesystem>

#include "mmhar/datasets.hpp"
#include "mmhar/npz.hpp"

namespace fs = std::filesystem;

namespace mmhar {

SensorSequence InlineProvider::sensor(const LabeledSample& sample) const {
  if (!sample.sensor) throw Error("sample '" + sample.sample_id + "' carries no sensor payload");
  return *sample.sensor;
}

VideoClip InlineProvider::video(const LabeledSample& sample) const {
  if (!sample.video) throw Error("sample '" + sample.sample_id + "' carries no video payload");
  return *sample.video;
}

FileProvider::FileProvider(std::string dataset_name, PreprocessConfig config, std::string cache_dir)
    : dataset_name_(std::move(dataset_name)), config_(config), cache_dir_(std::move(cache_dir)) {}

namespace {
std::string cache_file(const std::string& cache_dir, const std::string& dataset,
                       const std::string& cfg_key, const LabeledSample& sample,
                       const char* kind) {
  if (cache_dir.empty()) return {};
  std::string id = sample.sample_id;
  std::replace(id.begin(), id.end(), '/', '_');
  const fs::path dir = fs::path(cache_dir) / dataset / cfg_key;
  return (dir / (id + std::string(".") + kind + ".npz")).string();
}
}  // namespace

SensorSequence FileProvider::sensor(const LabeledSample& sample) const {
  if (sample.sensor) return *sample.sensor;
  if (sample.sensor_path.empty()) {
    throw LoadError("sample '" + sample.sample_id + "' has no sensor source");
  }

  const std::string cached = cache_file(cache_dir_, dataset_name_, config_.cache_key(), sample, "sensor");
  if (!cached.empty() && fs::exists(cached)) {
    const NpzArchive archive = NpzArchive::load(cached);
    if (archive.contains("sensor")) {
      SensorSequence seq;
      seq.sample_rate_hz = config_.sensor_rate_hz;
      seq.values = archive.at("sensor").tensor();
      return seq;
    }
  }

  SensorSequence raw;
  if (fs::path(sample.sensor_path).extension() == ".mat") {
    raw = read_utd_inertial(sample.sensor_path);
  } else {
    // MMAct-style CSV bundle: acc_phone (100 Hz) first, 50 Hz streams after.
    std::vector<SensorSequence> streams;
    streams.push_back(read_mmact_csv(sample.sensor_path, 100.0));
    for (const auto& path : sample.extra_sensor_paths) {
      streams.push_back(read_mmact_csv(path, 50.0));
    }
    raw = stack_sensor_streams(streams, config_.sensor_rate_hz);
  }

  SensorSequence out = preprocess_sensor(raw, config_);
  if (!cached.empty()) {
    fs::create_directories(fs::path(cached).parent_path());
    NpzWriter writer;
    writer.add("sensor", out.values);
    writer.save(cached);
  }
  return out;
}

VideoClip FileProvider::video(const LabeledSample& sample) const {
  if (sample.video) return *sample.video;
  if (sample.video_path.empty()) {
    throw LoadError("sample '" + sample.sample_id + "' has no video source");
  }

  const std::string cached = cache_file(cache_dir_, dataset_name_, config_.cache_key(), sample, "video");
  if (!cached.empty() && fs::exists(cached)) {
    const NpzArchive archive = NpzArchive::load(cached);
    if (archive.contains("video")) {
      VideoClip clip;
      clip.frame_rate_hz = config_.video_fps;
      clip.frames = archive.at("video").tensor();
      return clip;
    }
  }

  const VideoClip raw = read_video_file(sample.video_path);
  VideoClip out = preprocess_video(raw, config_);
  if (!cached.empty()) {
    fs::create_directories(fs::path(cached).parent_path());
    NpzWriter writer;
    writer.add("video", out.frames);
    writer.save(cached);
  }
  return out;
}

}  // namespace mmhar
