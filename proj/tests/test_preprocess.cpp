#include <doctest.h>

#include <cmath>

#include "mmhar/preprocess.hpp"
#include "mmhar/rng.hpp"

using namespace mmhar;

namespace {

SensorSequence ramp_sequence(std::int64_t channels, std::int64_t len, double rate) {
  SensorSequence seq;
  seq.sample_rate_hz = rate;
  seq.values = Tensor({channels, len});
  for (std::int64_t c = 0; c < channels; ++c) {
    for (std::int64_t t = 0; t < len; ++t) {
      seq.values.at(c, t) = static_cast<double>(t) + 100.0 * static_cast<double>(c);
    }
  }
  return seq;
}

VideoClip counting_clip(std::int64_t t_len, std::int64_t h, std::int64_t w, double fps) {
  VideoClip clip;
  clip.frame_rate_hz = fps;
  clip.frames = Tensor({t_len, h, w, 3});
  for (std::int64_t t = 0; t < t_len; ++t) {
    const double v = static_cast<double>(t) / static_cast<double>(t_len);
    for (std::int64_t i = t * h * w * 3; i < (t + 1) * h * w * 3; ++i) clip.frames[i] = v;
  }
  return clip;
}

}  // namespace

TEST_CASE("resample halves a 100 Hz stream to 50 Hz") {
  const SensorSequence seq = ramp_sequence(2, 200, 100.0);
  const SensorSequence out = resample_sensor(seq, 50.0);
  CHECK(out.timesteps() == 100);
  CHECK(out.sample_rate_hz == 50.0);
  CHECK(out.values.at(0, 1) == doctest::Approx(2.0));
}

TEST_CASE("resample identity when target equals source") {
  const SensorSequence seq = ramp_sequence(3, 57, 50.0);
  const SensorSequence out = resample_sensor(seq, 50.0);
  CHECK(out.values.values() == seq.values.values());
}

TEST_CASE("resample hand oracle: ramp 2 Hz to 1 Hz") {
  SensorSequence seq;
  seq.sample_rate_hz = 2.0;
  seq.values = Tensor({1, 4}, {0, 1, 2, 3});
  const SensorSequence out = resample_sensor(seq, 1.0);
  REQUIRE(out.timesteps() == 2);
  CHECK(out.values.at(0, 0) == 0.0);
  CHECK(out.values.at(0, 1) == 2.0);
}

TEST_CASE("resample rejects non-finite input") {
  SensorSequence seq = ramp_sequence(1, 8, 50.0);
  seq.values.at(0, 3) = std::nan("");
  CHECK_THROWS_AS(resample_sensor(seq, 25.0), Error);
}

TEST_CASE("resample round trip r -> 2r -> r on a ramp") {
  const SensorSequence seq = ramp_sequence(2, 64, 50.0);
  const SensorSequence up = resample_sensor(seq, 100.0);
  CHECK(up.timesteps() == 128);
  const SensorSequence back = resample_sensor(up, 50.0);
  REQUIRE(back.timesteps() == 64);
  for (std::int64_t i = 0; i < back.values.numel(); ++i) {
    CHECK(back.values[i] == doctest::Approx(seq.values[i]).epsilon(1e-6));
  }
}

TEST_CASE("pad_or_crop trailing zeros and prefix crop") {
  const SensorSequence seq = ramp_sequence(2, 90, 50.0);

  const SensorSequence padded = pad_or_crop(seq, 100);
  CHECK(padded.timesteps() == 100);
  for (std::int64_t t = 90; t < 100; ++t) {
    CHECK(padded.values.at(0, t) == 0.0);
    CHECK(padded.values.at(1, t) == 0.0);
  }
  CHECK(padded.values.at(1, 89) == seq.values.at(1, 89));

  const SensorSequence same = pad_or_crop(seq, 90);
  CHECK(same.values.values() == seq.values.values());

  const SensorSequence long_seq = ramp_sequence(1, 120, 50.0);
  const SensorSequence cropped = pad_or_crop(long_seq, 100);
  CHECK(cropped.timesteps() == 100);
  for (std::int64_t t = 0; t < 100; ++t) CHECK(cropped.values.at(0, t) == long_seq.values.at(0, t));
}

TEST_CASE("pad_or_crop output length covers 1..4x target") {
  const std::int64_t target = 25;
  for (std::int64_t len = 1; len <= 4 * target; ++len) {
    const SensorSequence seq = ramp_sequence(1, len, 50.0);
    CHECK(pad_or_crop(seq, target).timesteps() == target);
  }
}

TEST_CASE("frame sampling at half rate picks every 2nd frame") {
  const VideoClip clip = counting_clip(20, 4, 4, 30.0);
  const VideoClip out = sample_video_frames(clip, 15.0, 10);
  REQUIRE(out.time() == 10);
  for (std::int64_t t = 0; t < 10; ++t) {
    CHECK(out.frames.at(t, 0, 0, 0) == doctest::Approx(clip.frames.at(2 * t, 0, 0, 0)));
  }
}

TEST_CASE("frame sampling identity case") {
  const VideoClip clip = counting_clip(12, 4, 4, 15.0);
  const VideoClip out = sample_video_frames(clip, 15.0, 12);
  CHECK(out.frames.values() == clip.frames.values());
}

TEST_CASE("short clips repeat the last frame") {
  const VideoClip clip = counting_clip(10, 4, 4, 15.0);
  const VideoClip out = sample_video_frames(clip, 15.0, 12);
  REQUIRE(out.time() == 12);
  CHECK(out.frames.at(10, 1, 1, 0) == doctest::Approx(clip.frames.at(9, 1, 1, 0)));
  CHECK(out.frames.at(11, 1, 1, 0) == doctest::Approx(clip.frames.at(9, 1, 1, 0)));
}

TEST_CASE("bilinear resize keeps constant frames constant") {
  VideoClip clip = counting_clip(3, 8, 6, 15.0);
  const VideoClip out = resize_clip(clip, 4, 4);
  CHECK(out.height() == 4);
  CHECK(out.width() == 4);
  for (std::int64_t t = 0; t < 3; ++t) {
    const double expect = clip.frames.at(t, 0, 0, 0);
    for (std::int64_t y = 0; y < 4; ++y) {
      for (std::int64_t x = 0; x < 4; ++x) {
        CHECK(out.frames.at(t, y, x, 0) == doctest::Approx(expect));
      }
    }
  }
}

TEST_CASE("preprocess config produces canonical geometry") {
  PreprocessConfig cfg;
  cfg.sensor_rate_hz = 50.0;
  cfg.sensor_len = 160;
  cfg.video_fps = 15.0;
  cfg.video_frames = 32;
  cfg.video_height = 32;
  cfg.video_width = 32;

  const SensorSequence seq = preprocess_sensor(ramp_sequence(6, 300, 100.0), cfg);
  CHECK(seq.timesteps() == 160);
  CHECK(seq.sample_rate_hz == 50.0);

  const VideoClip clip = preprocess_video(counting_clip(90, 48, 64, 30.0), cfg);
  CHECK(clip.time() == 32);
  CHECK(clip.height() == 32);
  CHECK(clip.width() == 32);

  CHECK(cfg.cache_key().size() == 16);
  PreprocessConfig other = cfg;
  other.sensor_len = 161;
  CHECK(other.cache_key() != cfg.cache_key());
}
