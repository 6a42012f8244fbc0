#include "mmhar/datasets.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <regex>
#include <set>
#include <sstream>

#include "mmhar/preprocess.hpp"

namespace fs = std::filesystem;

namespace mmhar {
namespace {

const std::set<int> kUtdTrainSubjects{1, 3, 5, 7};
const std::set<int> kUtdTestSubjects{2, 4, 6, 8};
constexpr int kUtdNumClasses = 27;
constexpr int kMmactTrainMaxSubject = 16;

struct UtdKey {
  int action, subject, trial;
  bool operator<(const UtdKey& o) const {
    return std::tie(action, subject, trial) < std::tie(o.action, o.subject, o.trial);
  }
  std::string id() const {
    return "a" + std::to_string(action) + "_s" + std::to_string(subject) + "_t" +
           std::to_string(trial);
  }
};

std::map<UtdKey, std::string> scan_utd_dir(const fs::path& dir, const std::string& suffix) {
  std::map<UtdKey, std::string> out;
  if (!fs::is_directory(dir)) return out;
  const std::regex pattern("a(\\d+)_s(\\d+)_t(\\d+)_" + suffix);
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    std::smatch m;
    const std::string name = entry.path().filename().string();
    if (std::regex_match(name, m, pattern)) {
      out[{std::stoi(m[1]), std::stoi(m[2]), std::stoi(m[3])}] = entry.path().string();
    }
  }
  return out;
}

void finalize_utd_index(DatasetIndex& index, SplitTag tag) {
  index.split = tag;
  index.num_classes = kUtdNumClasses;
  for (int a = 1; a <= kUtdNumClasses; ++a) index.class_names.push_back("a" + std::to_string(a));
  std::sort(index.samples.begin(), index.samples.end(),
            [](const LabeledSample& x, const LabeledSample& y) { return x.sample_id < y.sample_id; });
  validate(index);
}

}  // namespace

LoadedDataset load_utd_mhad(const std::string& root_path, const LoadOptions& options) {
  const fs::path root(root_path);
  const fs::path inertial_dir = root / "Inertial";
  const fs::path rgb_dir = root / "RGB";
  if (!fs::is_directory(inertial_dir) && !fs::is_directory(rgb_dir)) {
    throw LoadError("utd-mhad: '" + root_path +
                    "' has neither Inertial/ nor RGB/ (expected the published archive layout)");
  }

  const auto inertial = scan_utd_dir(inertial_dir, "inertial\\.mat");
  const auto videos = scan_utd_dir(rgb_dir, "color\\.avi");

  std::set<UtdKey> keys;
  for (const auto& [k, v] : inertial) keys.insert(k);
  for (const auto& [k, v] : videos) keys.insert(k);
  if (keys.empty()) throw LoadError("utd-mhad: no samples found under '" + root_path + "'");

  LoadedDataset out;
  for (const UtdKey& key : keys) {
    if (key.action < 1 || key.action > kUtdNumClasses) {
      out.manifest.push_back(key.id() + ": action index outside 1..27, skipped");
      continue;
    }
    const bool has_sensor = inertial.count(key) > 0;
    const bool has_video = videos.count(key) > 0;
    if (!has_sensor || !has_video) {
      const std::string missing = has_sensor ? "video" : "inertial";
      if (options.require_both_modalities) {
        throw LoadError("utd-mhad sample " + key.id() + ": missing " + missing + " file");
      }
      out.manifest.push_back(key.id() + ": missing " + missing + " file, kept single-modality");
    }

    LabeledSample s;
    s.sample_id = key.id();
    s.subject_id = key.subject;
    s.class_id = key.action - 1;
    if (has_sensor) s.sensor_path = inertial.at(key);
    if (has_video) s.video_path = videos.at(key);
    s.modality_mask.imu = has_sensor;
    s.modality_mask.video = has_video;

    if (kUtdTrainSubjects.count(key.subject)) {
      out.train.samples.push_back(std::move(s));
    } else if (kUtdTestSubjects.count(key.subject)) {
      out.test.samples.push_back(std::move(s));
    } else {
      out.manifest.push_back(key.id() + ": subject outside protocol sets {1..8}, skipped");
    }
  }

  finalize_utd_index(out.train, SplitTag::kTrain);
  finalize_utd_index(out.test, SplitTag::kTest);
  return out;
}

namespace {

// Scan order fixes channel-stack order; acc_phone (100 Hz) always first.
const std::array<const char*, 4> kMmactSensorDirs{"acc_phone_clip", "acc_watch_clip",
                                                  "gyro_clip", "orientation_clip"};

int mmact_subject_of(const fs::path& rel) {
  for (const auto& part : rel) {
    std::smatch m;
    const std::string s = part.string();
    static const std::regex re("subject(\\d+)", std::regex::icase);
    if (std::regex_match(s, m, re)) return std::stoi(m[1]);
  }
  return -1;
}

/// Maps "<root>/<stream>/subjectN/.../<action>.<ext>" onto a stream-agnostic
/// sample key "subjectN/.../<action>".
std::map<std::string, std::string> scan_mmact_tree(const fs::path& dir,
                                                   const std::set<std::string>& extensions) {
  std::map<std::string, std::string> out;
  if (!fs::is_directory(dir)) return out;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    std::string ext = entry.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), ::tolower);
    if (!extensions.count(ext)) continue;
    fs::path rel = fs::relative(entry.path(), dir);
    rel.replace_extension();
    out[rel.generic_string()] = entry.path().string();
  }
  return out;
}

std::string mmact_action_of(const std::string& key) {
  const auto pos = key.find_last_of('/');
  std::string stem = pos == std::string::npos ? key : key.substr(pos + 1);
  std::transform(stem.begin(), stem.end(), stem.begin(), ::tolower);
  // trailing "_<n>" counters name repeats of the same action
  const static std::regex trail("^(.*)_(\\d+)$");
  std::smatch m;
  if (std::regex_match(stem, m, trail) && !m[1].str().empty()) return m[1];
  return stem;
}

}  // namespace

LoadedDataset load_mmact(const std::string& root_path, const LoadOptions& options) {
  const fs::path root(root_path);

  const auto videos = scan_mmact_tree(root / "video", {".mp4", ".avi"});
  std::array<std::map<std::string, std::string>, 4> sensor_trees;
  for (std::size_t i = 0; i < kMmactSensorDirs.size(); ++i) {
    sensor_trees[i] = scan_mmact_tree(root / kMmactSensorDirs[i], {".csv"});
  }

  std::set<std::string> keys;
  for (const auto& [k, v] : videos) keys.insert(k);
  for (const auto& tree : sensor_trees) {
    for (const auto& [k, v] : tree) keys.insert(k);
  }
  if (keys.empty()) {
    throw LoadError("mmact: no samples found under '" + root_path +
                    "' (expected video/ and *_clip/ sensor trees)");
  }

  std::set<std::string> action_names;
  for (const auto& key : keys) action_names.insert(mmact_action_of(key));
  std::vector<std::string> class_names(action_names.begin(), action_names.end());
  std::map<std::string, int> class_of;
  for (std::size_t i = 0; i < class_names.size(); ++i) class_of[class_names[i]] = static_cast<int>(i);

  LoadedDataset out;
  for (const auto& key : keys) {
    const int subject = mmact_subject_of(key);
    if (subject < 1) {
      out.manifest.push_back(key + ": no subject directory in path, skipped");
      continue;
    }
    const bool has_video = videos.count(key) > 0;
    std::vector<std::string> sensor_paths;
    int found_streams = 0;
    for (std::size_t i = 0; i < sensor_trees.size(); ++i) {
      auto it = sensor_trees[i].find(key);
      if (it != sensor_trees[i].end()) {
        sensor_paths.push_back(it->second);
        ++found_streams;
      }
    }
    const bool has_sensor = found_streams == static_cast<int>(kMmactSensorDirs.size());
    if (!has_sensor && found_streams > 0) {
      out.manifest.push_back(key + ": only " + std::to_string(found_streams) +
                             "/4 sensor streams present, sensor modality dropped");
    }
    if (!has_sensor && !has_video) {
      out.manifest.push_back(key + ": no usable modality, skipped");
      continue;
    }
    if (options.require_both_modalities && (!has_sensor || !has_video)) {
      throw LoadError("mmact sample " + key + ": missing " +
                      std::string(has_sensor ? "video" : "sensor") + " modality");
    }

    LabeledSample s;
    s.sample_id = key;
    s.subject_id = subject;
    s.class_id = class_of.at(mmact_action_of(key));
    if (has_video) s.video_path = videos.at(key);
    if (has_sensor) {
      s.sensor_path = sensor_paths.front();
      s.extra_sensor_paths.assign(sensor_paths.begin() + 1, sensor_paths.end());
    }
    s.modality_mask.imu = has_sensor;
    s.modality_mask.video = has_video;

    auto& split = subject <= kMmactTrainMaxSubject ? out.train : out.test;
    split.samples.push_back(std::move(s));
  }

  for (auto* index : {&out.train, &out.test}) {
    index->num_classes = static_cast<int>(class_names.size());
    index->class_names = class_names;
    std::sort(index->samples.begin(), index->samples.end(),
              [](const LabeledSample& x, const LabeledSample& y) { return x.sample_id < y.sample_id; });
  }
  out.train.split = SplitTag::kTrain;
  out.test.split = SplitTag::kTest;
  validate(out.train);
  validate(out.test);
  return out;
}

SensorSequence read_mmact_csv(const std::string& path, double rate_hz) {
  std::ifstream f(path);
  if (!f) throw LoadError("mmact csv: cannot open '" + path + "'");

  std::vector<std::array<double, 3>> rows;
  std::string line;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    std::vector<double> fields;
    double v;
    while (ss >> v) fields.push_back(v);
    if (fields.size() < 3) continue;  // header or malformed line
    // last three fields are x, y, z; a leading field, when present, is a timestamp
    rows.push_back({fields[fields.size() - 3], fields[fields.size() - 2], fields.back()});
  }
  if (rows.empty()) throw LoadError("mmact csv: no numeric rows in '" + path + "'");

  SensorSequence seq;
  seq.sample_rate_hz = rate_hz;
  const auto steps = static_cast<std::int64_t>(rows.size());
  seq.values = Tensor({3, steps});
  for (std::int64_t t = 0; t < steps; ++t) {
    for (std::int64_t c = 0; c < 3; ++c) seq.values.at(c, t) = rows[static_cast<std::size_t>(t)][static_cast<std::size_t>(c)];
  }
  seq.channel_names = {"x", "y", "z"};
  if (!seq.values.all_finite()) throw LoadError("mmact csv: non-finite values in '" + path + "'");
  return seq;
}

SensorSequence stack_sensor_streams(const std::vector<SensorSequence>& streams,
                                    double target_rate_hz) {
  if (streams.empty()) throw Error("stack_sensor_streams: no streams");
  std::vector<SensorSequence> unified;
  unified.reserve(streams.size());
  std::int64_t min_len = INT64_MAX;
  for (const auto& s : streams) {
    unified.push_back(resample_sensor(s, target_rate_hz));
    min_len = std::min(min_len, unified.back().timesteps());
  }

  std::int64_t total_channels = 0;
  for (const auto& s : unified) total_channels += s.channels();

  SensorSequence out;
  out.sample_rate_hz = target_rate_hz;
  out.values = Tensor({total_channels, min_len});
  std::int64_t row = 0;
  for (const auto& s : unified) {
    for (std::int64_t c = 0; c < s.channels(); ++c, ++row) {
      for (std::int64_t t = 0; t < min_len; ++t) out.values.at(row, t) = s.values.at(c, t);
      out.channel_names.push_back(s.channel_names.size() > static_cast<std::size_t>(c)
                                      ? s.channel_names[static_cast<std::size_t>(c)]
                                      : "ch" + std::to_string(row));
    }
  }
  return out;
}

}  // namespace mmhar
