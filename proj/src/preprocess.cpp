#include "mmhar/preprocess.hpp"

#include <algorithm>
#include <cmath>

#include "mmhar/hashing.hpp"

namespace mmhar {

SensorSequence resample_sensor(const SensorSequence& seq, double target_rate_hz) {
  if (target_rate_hz <= 0.0) throw Error("resample_sensor: target rate must be positive");
  if (!seq.values.all_finite()) throw Error("resample_sensor: non-finite input values");

  if (target_rate_hz == seq.sample_rate_hz) {
    return seq;
  }
  const std::int64_t channels = seq.channels();
  const std::int64_t len = seq.timesteps();
  const auto out_len = static_cast<std::int64_t>(
      std::llround(static_cast<double>(len) * target_rate_hz / seq.sample_rate_hz));
  const std::int64_t new_len = std::max<std::int64_t>(1, out_len);

  SensorSequence out;
  out.sample_rate_hz = target_rate_hz;
  out.channel_names = seq.channel_names;
  out.values = Tensor({channels, new_len});
  const double step = seq.sample_rate_hz / target_rate_hz;
  for (std::int64_t c = 0; c < channels; ++c) {
    for (std::int64_t t = 0; t < new_len; ++t) {
      const double pos = static_cast<double>(t) * step;
      const auto lo = static_cast<std::int64_t>(std::floor(pos));
      if (lo >= len - 1) {
        out.values.at(c, t) = seq.values.at(c, len - 1);
      } else {
        const double frac = pos - static_cast<double>(lo);
        out.values.at(c, t) =
            (1.0 - frac) * seq.values.at(c, lo) + frac * seq.values.at(c, lo + 1);
      }
    }
  }
  return out;
}

SensorSequence pad_or_crop(const SensorSequence& seq, std::int64_t target_len) {
  if (target_len < 1) throw Error("pad_or_crop: target_len must be >= 1");
  const std::int64_t channels = seq.channels();
  const std::int64_t len = seq.timesteps();
  if (len == target_len) return seq;

  SensorSequence out;
  out.sample_rate_hz = seq.sample_rate_hz;
  out.channel_names = seq.channel_names;
  out.values = Tensor({channels, target_len});
  const std::int64_t copy_len = std::min(len, target_len);
  for (std::int64_t c = 0; c < channels; ++c) {
    for (std::int64_t t = 0; t < copy_len; ++t) out.values.at(c, t) = seq.values.at(c, t);
    // tail stays zero when target_len > len
  }
  return out;
}

VideoClip sample_video_frames(const VideoClip& clip, double target_fps, std::int64_t num_frames) {
  if (clip.time() < 1) throw Error("sample_video_frames: empty clip");
  if (target_fps <= 0.0 || num_frames < 1) {
    throw Error("sample_video_frames: target_fps and num_frames must be positive");
  }

  const std::int64_t src_t = clip.time();
  const double stride = clip.frame_rate_hz / target_fps;

  std::vector<std::int64_t> picks;
  for (std::int64_t i = 0; static_cast<std::int64_t>(picks.size()) < num_frames; ++i) {
    const auto idx = static_cast<std::int64_t>(std::llround(static_cast<double>(i) * stride));
    if (idx >= src_t) break;
    picks.push_back(idx);
  }
  if (picks.empty()) picks.push_back(0);
  while (static_cast<std::int64_t>(picks.size()) < num_frames) picks.push_back(picks.back());

  const std::int64_t h = clip.height();
  const std::int64_t w = clip.width();
  VideoClip out;
  out.frame_rate_hz = target_fps;
  out.frames = Tensor({num_frames, h, w, 3});
  const std::int64_t frame_elems = h * w * 3;
  for (std::int64_t t = 0; t < num_frames; ++t) {
    const double* src = clip.frames.data() + picks[static_cast<std::size_t>(t)] * frame_elems;
    double* dst = out.frames.data() + t * frame_elems;
    std::copy(src, src + frame_elems, dst);
  }
  return out;
}

VideoClip resize_clip(const VideoClip& clip, std::int64_t height, std::int64_t width) {
  if (height < 1 || width < 1) throw Error("resize_clip: target size must be positive");
  if (clip.height() == height && clip.width() == width) return clip;

  const std::int64_t t_len = clip.time();
  const std::int64_t sh = clip.height();
  const std::int64_t sw = clip.width();
  VideoClip out;
  out.frame_rate_hz = clip.frame_rate_hz;
  out.frames = Tensor({t_len, height, width, 3});

  const double sy = height > 1 ? static_cast<double>(sh - 1) / static_cast<double>(height - 1) : 0.0;
  const double sx = width > 1 ? static_cast<double>(sw - 1) / static_cast<double>(width - 1) : 0.0;
  for (std::int64_t t = 0; t < t_len; ++t) {
    for (std::int64_t y = 0; y < height; ++y) {
      const double fy = static_cast<double>(y) * sy;
      const auto y0 = static_cast<std::int64_t>(std::floor(fy));
      const std::int64_t y1 = std::min(y0 + 1, sh - 1);
      const double wy = fy - static_cast<double>(y0);
      for (std::int64_t x = 0; x < width; ++x) {
        const double fx = static_cast<double>(x) * sx;
        const auto x0 = static_cast<std::int64_t>(std::floor(fx));
        const std::int64_t x1 = std::min(x0 + 1, sw - 1);
        const double wx = fx - static_cast<double>(x0);
        for (std::int64_t c = 0; c < 3; ++c) {
          const double v00 = clip.frames.at(t, y0, x0, c);
          const double v01 = clip.frames.at(t, y0, x1, c);
          const double v10 = clip.frames.at(t, y1, x0, c);
          const double v11 = clip.frames.at(t, y1, x1, c);
          out.frames.at(t, y, x, c) = (1.0 - wy) * ((1.0 - wx) * v00 + wx * v01) +
                                      wy * ((1.0 - wx) * v10 + wx * v11);
        }
      }
    }
  }
  return out;
}

std::string PreprocessConfig::cache_key() const {
  std::string s = "sensor_rate=" + std::to_string(sensor_rate_hz) +
                  ";sensor_len=" + std::to_string(sensor_len) +
                  ";video_fps=" + std::to_string(video_fps) +
                  ";video_frames=" + std::to_string(video_frames) +
                  ";video_h=" + std::to_string(video_height) +
                  ";video_w=" + std::to_string(video_width);
  return hex64(fnv1a64(s));
}

SensorSequence preprocess_sensor(const SensorSequence& raw, const PreprocessConfig& cfg) {
  SensorSequence seq = resample_sensor(raw, cfg.sensor_rate_hz);
  return pad_or_crop(seq, cfg.sensor_len);
}

VideoClip preprocess_video(const VideoClip& raw, const PreprocessConfig& cfg) {
  VideoClip clip = sample_video_frames(raw, cfg.video_fps, cfg.video_frames);
  return resize_clip(clip, cfg.video_height, cfg.video_width);
}

}  // namespace mmhar
