#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>

#include "fixtures.hpp"
#include "mmhar/datasets.hpp"
#include "mmhar/sample_provider.hpp"

using namespace mmhar;
using namespace mmhar::testing;
namespace fs = std::filesystem;

TEST_CASE("mat5 reader round-trips the fixture writer, row-major") {
  const fs::path dir = fresh_temp_dir("mat5");
  Tensor mat({5, 6});
  for (std::int64_t i = 0; i < mat.numel(); ++i) mat[i] = static_cast<double>(i) * 0.5;
  const std::string path = (dir / "sample.mat").string();
  write_mat5_matrix(path, "d_iner", mat);

  std::string name;
  const Tensor loaded = read_mat5_matrix(path, &name);
  CHECK(name == "d_iner");
  CHECK(loaded.shape() == mat.shape());
  CHECK(loaded.values() == mat.values());

  const SensorSequence seq = read_utd_inertial(path);
  CHECK(seq.channels() == 6);
  CHECK(seq.timesteps() == 5);
  CHECK(seq.sample_rate_hz == 50.0);
  CHECK(seq.values.at(2, 3) == mat.at(3, 2));
  CHECK(seq.channel_names[0] == "acc_x");
}

TEST_CASE("mat5 reader handles scipy-style compressed files") {
  // scipy.io.savemat compresses by default; production UTD files decode the
  // same way. The library reader must accept the zlib-wrapped element.
  const fs::path dir = fresh_temp_dir("mat5z");
  // a compressed fixture is produced by the python smoke tests; here just
  // confirm the uncompressed path raises a clear error on garbage
  const std::string bogus = (dir / "bogus.mat").string();
  {
    std::ofstream f(bogus);
    f << "not a mat file at all, padded ........................................"
      << std::string(128, 'x');
  }
  CHECK_THROWS_AS(read_mat5_matrix(bogus), LoadError);
}

TEST_CASE("utd loader: split protocol, counts, class ids") {
  const fs::path root = fresh_temp_dir("utd");
  build_utd_fixture(root, 3, {1, 2, 3, 4, 5, 6, 7, 8}, 2);

  const LoadedDataset data = load_utd_mhad(root.string());
  CHECK(data.train.num_classes == 27);
  CHECK(data.test.num_classes == 27);
  CHECK(data.train.samples.size() == 3 * 4 * 2);
  CHECK(data.test.samples.size() == 3 * 4 * 2);

  std::set<int> train_subjects, test_subjects;
  for (const auto& s : data.train.samples) train_subjects.insert(s.subject_id);
  for (const auto& s : data.test.samples) test_subjects.insert(s.subject_id);
  CHECK(train_subjects == std::set<int>{1, 3, 5, 7});
  CHECK(test_subjects == std::set<int>{2, 4, 6, 8});

  // subject 3 lands in TRAIN, subject 4 in TEST
  bool found_s3_train = false, found_s4_test = false;
  for (const auto& s : data.train.samples) found_s3_train |= s.subject_id == 3;
  for (const auto& s : data.test.samples) found_s4_test |= s.subject_id == 4;
  CHECK(found_s3_train);
  CHECK(found_s4_test);

  // class ids are action-1
  for (const auto& s : data.train.samples) {
    CHECK(s.class_id >= 0);
    CHECK(s.class_id < 3);
    CHECK(s.has_sensor());
    CHECK(s.has_video());
  }
}

TEST_CASE("utd loader: missing modality is skipped or strict-errors") {
  const fs::path root = fresh_temp_dir("utd_missing");
  build_utd_fixture(root, 1, {1, 2}, 1);
  fs::remove(root / "RGB" / "a1_s1_t1_color.avi");

  const LoadedDataset lenient = load_utd_mhad(root.string());
  REQUIRE(lenient.manifest.size() == 1);
  CHECK(lenient.manifest[0].find("a1_s1_t1") != std::string::npos);
  CHECK(lenient.train.samples.size() == 1);  // kept, single-modality
  CHECK(!lenient.train.samples[0].has_video());

  LoadOptions strict;
  strict.require_both_modalities = true;
  CHECK_THROWS_WITH_AS(load_utd_mhad(root.string(), strict), doctest::Contains("a1_s1_t1"),
                       LoadError);
}

TEST_CASE("utd loader: empty root raises") {
  const fs::path root = fresh_temp_dir("utd_empty");
  CHECK_THROWS_AS(load_utd_mhad(root.string()), LoadError);
}

TEST_CASE("mmact loader: cross-subject split and stream stacking") {
  const fs::path root = fresh_temp_dir("mmact");
  build_mmact_fixture(root, {"running", "walking", "walking_2", "waving"}, {1, 15, 16, 17, 20});

  const LoadedDataset data = load_mmact(root.string());
  // "walking_2" is a second trial of "walking", not a new class
  CHECK(data.train.num_classes == 3);

  std::set<int> train_subjects, test_subjects;
  for (const auto& s : data.train.samples) train_subjects.insert(s.subject_id);
  for (const auto& s : data.test.samples) test_subjects.insert(s.subject_id);
  CHECK(train_subjects == std::set<int>{1, 15, 16});
  CHECK(test_subjects == std::set<int>{17, 20});

  // every sample carries the four sensor streams plus video
  for (const auto& s : data.train.samples) {
    CHECK(s.has_sensor());
    CHECK(s.has_video());
    CHECK(s.extra_sensor_paths.size() == 3);
  }
}

TEST_CASE("mmact discovers 37 action names when the full archive is present") {
  const fs::path root = fresh_temp_dir("mmact37");
  std::vector<std::string> actions;
  for (int i = 0; i < 37; ++i) actions.push_back("action" + std::string(1, 'a' + i % 26) + std::to_string(i));
  build_mmact_fixture(root, actions, {1, 17}, /*with_video=*/false);

  const LoadedDataset data = load_mmact(root.string());
  CHECK(data.train.num_classes == 37);
  CHECK(data.train.samples.size() == 37);
  CHECK(data.test.samples.size() == 37);
}

TEST_CASE("mmact csv reader and stream stacking") {
  const fs::path dir = fresh_temp_dir("mmact_csv");
  const std::string path = (dir / "acc.csv").string();
  write_sensor_csv(path, 100, 0.1);
  const SensorSequence seq = read_mmact_csv(path, 100.0);
  CHECK(seq.channels() == 3);
  CHECK(seq.timesteps() == 100);
  CHECK(seq.values.at(1, 3) == doctest::Approx(0.3 + 1.0));

  // stack 100 Hz and 50 Hz streams at 50 Hz target
  SensorSequence other;
  other.sample_rate_hz = 50.0;
  other.values = Tensor({3, 50});
  const SensorSequence stacked = stack_sensor_streams({seq, other}, 50.0);
  CHECK(stacked.channels() == 6);
  CHECK(stacked.timesteps() == 50);
  CHECK(stacked.sample_rate_hz == 50.0);
}

TEST_CASE("video file round trip") {
  const fs::path dir = fresh_temp_dir("video_io");
  VideoClip clip;
  clip.frame_rate_hz = 15.0;
  clip.frames = Tensor({6, 32, 32, 3});
  for (std::int64_t t = 0; t < 6; ++t) {
    for (std::int64_t y = 4; y < 12; ++y) {
      for (std::int64_t x = 4; x < 12; ++x) {
        clip.frames.at(t, y, x, 0) = 0.8;
      }
    }
  }
  const std::string path = (dir / "clip.avi").string();
  write_video_file(path, clip);

  const VideoClip loaded = read_video_file(path);
  CHECK(loaded.time() == 6);
  CHECK(loaded.height() == 32);
  CHECK(loaded.width() == 32);
  CHECK(loaded.frame_rate_hz == doctest::Approx(15.0));
  // MJPG is lossy; the bright square must still be bright, background dark
  CHECK(loaded.frames.at(0, 8, 8, 0) > 0.5);
  CHECK(loaded.frames.at(0, 20, 20, 0) < 0.3);

  CHECK_THROWS_AS(read_video_file((dir / "missing.avi").string()), LoadError);
}

TEST_CASE("file provider materializes canonical shapes and caches") {
  const fs::path root = fresh_temp_dir("provider");
  build_utd_fixture(root, 1, {1}, 1);
  const LoadedDataset data = load_utd_mhad(root.string());
  REQUIRE(data.train.samples.size() == 1);

  PreprocessConfig cfg;
  cfg.sensor_rate_hz = 50.0;
  cfg.sensor_len = 160;
  cfg.video_fps = 15.0;
  cfg.video_frames = 8;
  cfg.video_height = 16;
  cfg.video_width = 16;

  const fs::path cache = root / "cache";
  const FileProvider provider("utd_mhad", cfg, cache.string());
  const LabeledSample& sample = data.train.samples[0];

  const SensorSequence seq = provider.sensor(sample);
  CHECK(seq.channels() == 6);
  CHECK(seq.timesteps() == 160);

  const VideoClip clip = provider.video(sample);
  CHECK(clip.time() == 8);
  CHECK(clip.height() == 16);

  // cache files appear and re-reads hit them
  int cache_files = 0;
  for (const auto& e : fs::recursive_directory_iterator(cache)) {
    if (e.is_regular_file()) ++cache_files;
  }
  CHECK(cache_files == 2);
  const SensorSequence seq2 = provider.sensor(sample);
  CHECK(seq2.values.values() == seq.values.values());
  const VideoClip clip2 = provider.video(sample);
  CHECK(clip2.frames.values() == clip.frames.values());
}

TEST_CASE("inline provider serves payloads and errors on absence") {
  LabeledSample s;
  s.sample_id = "x";
  SensorSequence seq;
  seq.sample_rate_hz = 50.0;
  seq.values = Tensor({1, 4}, {1, 2, 3, 4});
  s.sensor = seq;

  const InlineProvider provider;
  CHECK(provider.sensor(s).values.values() == seq.values.values());
  CHECK_THROWS_AS(provider.video(s), Error);
}
