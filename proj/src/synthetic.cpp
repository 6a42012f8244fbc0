#include "mmhar/synthetic.hpp"

#include <algorithm>
#include <cmath>

#include "mmhar/npz.hpp"
#include "mmhar/rng.hpp"

#include <nlohmann/json.hpp>

namespace mmhar {
namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kBackground = 0.1;
constexpr double kForeground = 0.9;

struct Direction {
  int dy, dx;
};

// Motion directions for video factors; cycles for b >= 8.
constexpr std::array<Direction, 8> kDirections{{{0, 1}, {0, -1}, {1, 0}, {-1, 0},
                                                {1, 1}, {-1, -1}, {1, -1}, {-1, 1}}};

}  // namespace

void SyntheticSpec::validate() const {
  if (num_imu_factors < 1 || num_video_factors < 1) {
    throw Error("SyntheticSpec: factor counts must be >= 1");
  }
  if (samples_per_class < 1) throw Error("SyntheticSpec: samples_per_class must be >= 1");
  if (noise_std < 0.0) throw Error("SyntheticSpec: noise_std must be nonnegative");
  if (seq_len < 1) throw Error("SyntheticSpec: seq_len must be >= 1");
  if (clip_shape[0] < 1 || clip_shape[1] < 4 || clip_shape[2] < 4) {
    throw Error("SyntheticSpec: clip_shape must be at least [1 x 4 x 4]");
  }
  if (sensor_channels < 1) throw Error("SyntheticSpec: sensor_channels must be >= 1");
}

Tensor sensor_template(const SyntheticSpec& spec, int imu_factor) {
  const std::int64_t channels = spec.sensor_channels;
  const std::int64_t len = spec.seq_len;
  Tensor out({channels, len});
  const double cycles = static_cast<double>(imu_factor + 1);
  for (std::int64_t c = 0; c < channels; ++c) {
    const double phase = static_cast<double>(c) * kPi / 4.0;
    for (std::int64_t t = 0; t < len; ++t) {
      out.at(c, t) = std::sin(2.0 * kPi * cycles * static_cast<double>(t) /
                                  static_cast<double>(len) +
                              phase);
    }
  }
  return out;
}

Tensor video_template(const SyntheticSpec& spec, int video_factor) {
  const std::int64_t time = spec.clip_shape[0];
  const std::int64_t height = spec.clip_shape[1];
  const std::int64_t width = spec.clip_shape[2];
  Tensor out({time, height, width, 3});
  out.fill(kBackground);

  const std::int64_t side = std::max<std::int64_t>(2, height / 4);
  const Direction dir = kDirections[static_cast<std::size_t>(video_factor) % kDirections.size()];
  // Travel the full free range over the clip; start at the edge the motion
  // leaves from so the square stays in bounds.
  const std::int64_t free_y = height - side;
  const std::int64_t free_x = width - side;
  const std::int64_t start_y = dir.dy >= 0 ? 0 : free_y;
  const std::int64_t start_x = dir.dx >= 0 ? 0 : free_x;
  const double step_y = time > 1 ? static_cast<double>(free_y) / static_cast<double>(time - 1) : 0.0;
  const double step_x = time > 1 ? static_cast<double>(free_x) / static_cast<double>(time - 1) : 0.0;

  for (std::int64_t t = 0; t < time; ++t) {
    const auto y0 = start_y + static_cast<std::int64_t>(std::llround(
                                  static_cast<double>(dir.dy) * step_y * static_cast<double>(t)));
    const auto x0 = start_x + static_cast<std::int64_t>(std::llround(
                                  static_cast<double>(dir.dx) * step_x * static_cast<double>(t)));
    const std::int64_t cy = std::clamp<std::int64_t>(y0, 0, free_y);
    const std::int64_t cx = std::clamp<std::int64_t>(x0, 0, free_x);
    for (std::int64_t y = cy; y < cy + side; ++y) {
      for (std::int64_t x = cx; x < cx + side; ++x) {
        for (std::int64_t ch = 0; ch < 3; ++ch) out.at(t, y, x, ch) = kForeground;
      }
    }
  }
  return out;
}

namespace {

LabeledSample make_sample(const SyntheticSpec& spec, int class_id, int ordinal,
                          const std::string& split_name, const Tensor& sensor_tpl,
                          const Tensor& video_tpl, Rng& rng) {
  LabeledSample s;
  s.sample_id = "syn_" + split_name + "_c" + std::to_string(class_id) + "_i" + std::to_string(ordinal);
  s.subject_id = split_name == "train" ? 1 : 2;
  s.class_id = class_id;

  SensorSequence seq;
  seq.sample_rate_hz = 50.0;
  seq.values = sensor_tpl;
  for (double& v : seq.values.values()) v += rng.normal(0.0, spec.noise_std);
  for (int c = 0; c < spec.sensor_channels; ++c) {
    seq.channel_names.push_back("ch" + std::to_string(c));
  }
  s.sensor = std::move(seq);

  VideoClip clip;
  clip.frame_rate_hz = 15.0;
  clip.frames = video_tpl;
  for (double& v : clip.frames.values()) {
    v = std::clamp(v + rng.normal(0.0, spec.noise_std), 0.0, 1.0);
  }
  s.video = std::move(clip);
  return s;
}

DatasetIndex make_split(const SyntheticSpec& spec, std::uint64_t seed, SplitTag tag,
                        int per_class, const std::vector<Tensor>& sensor_tpls,
                        const std::vector<Tensor>& video_tpls) {
  const std::string split_name = tag == SplitTag::kTrain ? "train" : "test";
  DatasetIndex index;
  index.split = tag;
  index.num_classes = spec.num_classes();
  for (int c = 0; c < index.num_classes; ++c) {
    index.class_names.push_back("class_a" + std::to_string(spec.imu_factor_of(c)) + "_b" +
                                std::to_string(spec.video_factor_of(c)));
  }
  Rng rng(derive_seed(seed, "synthetic/" + split_name));
  for (int c = 0; c < index.num_classes; ++c) {
    for (int i = 0; i < per_class; ++i) {
      index.samples.push_back(make_sample(spec, c, i, split_name,
                                          sensor_tpls[static_cast<std::size_t>(spec.imu_factor_of(c))],
                                          video_tpls[static_cast<std::size_t>(spec.video_factor_of(c))],
                                          rng));
    }
  }
  validate(index);
  return index;
}

}  // namespace

std::pair<DatasetIndex, DatasetIndex> generate_synthetic_dataset(const SyntheticSpec& spec,
                                                                 std::uint64_t seed) {
  spec.validate();
  std::vector<Tensor> sensor_tpls, video_tpls;
  for (int a = 0; a < spec.num_imu_factors; ++a) sensor_tpls.push_back(sensor_template(spec, a));
  for (int b = 0; b < spec.num_video_factors; ++b) video_tpls.push_back(video_template(spec, b));

  const int test_per_class =
      spec.test_samples_per_class > 0 ? spec.test_samples_per_class : spec.samples_per_class;
  DatasetIndex train = make_split(spec, seed, SplitTag::kTrain, spec.samples_per_class,
                                  sensor_tpls, video_tpls);
  DatasetIndex test =
      make_split(spec, seed, SplitTag::kTest, test_per_class, sensor_tpls, video_tpls);
  return {std::move(train), std::move(test)};
}

void save_synthetic_archive(const std::string& path, const DatasetIndex& index,
                            const SyntheticSpec& spec, std::uint64_t seed) {
  NpzWriter writer;
  nlohmann::json header;
  header["format"] = "mmhar-synthetic-v1";
  header["seed"] = seed;
  header["split"] = to_string(index.split);
  header["num_classes"] = index.num_classes;
  header["class_names"] = index.class_names;
  header["spec"] = {{"num_imu_factors", spec.num_imu_factors},
                    {"num_video_factors", spec.num_video_factors},
                    {"samples_per_class", spec.samples_per_class},
                    {"noise_std", spec.noise_std},
                    {"seq_len", spec.seq_len},
                    {"clip_shape", spec.clip_shape},
                    {"sensor_channels", spec.sensor_channels},
                    {"test_samples_per_class", spec.test_samples_per_class}};
  nlohmann::json samples = nlohmann::json::array();
  for (std::size_t i = 0; i < index.samples.size(); ++i) {
    const auto& s = index.samples[i];
    samples.push_back({{"sample_id", s.sample_id},
                       {"subject_id", s.subject_id},
                       {"class_id", s.class_id},
                       {"mask_imu", s.modality_mask.imu},
                       {"mask_video", s.modality_mask.video}});
    writer.add("sensor/" + std::to_string(i), s.sensor->values);
    writer.add("video/" + std::to_string(i), s.video->frames);
  }
  header["samples"] = std::move(samples);
  writer.add_bytes("__header_json__", header.dump());
  writer.save(path);
}

DatasetIndex load_synthetic_archive(const std::string& path, SyntheticSpec* spec_out,
                                    std::uint64_t* seed_out) {
  const NpzArchive archive = NpzArchive::load(path);
  const auto header = nlohmann::json::parse(archive.at("__header_json__").text());
  if (header.value("format", "") != "mmhar-synthetic-v1") {
    throw LoadError("synthetic archive '" + path + "': unrecognized format");
  }

  SyntheticSpec spec;
  const auto& js = header.at("spec");
  spec.num_imu_factors = js.at("num_imu_factors");
  spec.num_video_factors = js.at("num_video_factors");
  spec.samples_per_class = js.at("samples_per_class");
  spec.noise_std = js.at("noise_std");
  spec.seq_len = js.at("seq_len");
  spec.clip_shape = js.at("clip_shape");
  spec.sensor_channels = js.at("sensor_channels");
  spec.test_samples_per_class = js.at("test_samples_per_class");
  if (spec_out) *spec_out = spec;
  if (seed_out) *seed_out = header.at("seed");

  DatasetIndex index;
  index.split = header.at("split") == "TRAIN" ? SplitTag::kTrain : SplitTag::kTest;
  index.num_classes = header.at("num_classes");
  index.class_names = header.at("class_names").get<std::vector<std::string>>();

  const auto& samples = header.at("samples");
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& sj = samples[i];
    LabeledSample s;
    s.sample_id = sj.at("sample_id");
    s.subject_id = sj.at("subject_id");
    s.class_id = sj.at("class_id");
    s.modality_mask.imu = sj.at("mask_imu");
    s.modality_mask.video = sj.at("mask_video");

    SensorSequence seq;
    seq.sample_rate_hz = 50.0;
    seq.values = archive.at("sensor/" + std::to_string(i)).tensor();
    for (int c = 0; c < spec.sensor_channels; ++c) seq.channel_names.push_back("ch" + std::to_string(c));
    s.sensor = std::move(seq);

    VideoClip clip;
    clip.frame_rate_hz = 15.0;
    clip.frames = archive.at("video/" + std::to_string(i)).tensor();
    s.video = std::move(clip);

    index.samples.push_back(std::move(s));
  }
  validate(index);
  return index;
}

}  // namespace mmhar
