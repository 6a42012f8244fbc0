#pragma once

#include <array>
#include <cstdint>
#include <utility>

#include "mmhar/data_types.hpp"

namespace mmhar {

/// Factorized synthetic benchmark: class (a, b) encodes factor a only in the
/// sensor stream and factor b only in the video stream, so either modality
/// alone can recover at most its own factor.
struct SyntheticSpec {
  int num_imu_factors = 4;    // A
  int num_video_factors = 4;  // B
  int samples_per_class = 16;
  double noise_std = 0.25;
  std::int64_t seq_len = 64;
  std::array<std::int64_t, 3> clip_shape{4, 16, 16};  // time, height, width

  int sensor_channels = 3;
  int test_samples_per_class = 0;  // 0: same as samples_per_class

  int num_classes() const { return num_imu_factors * num_video_factors; }
  int imu_factor_of(int class_id) const { return class_id / num_video_factors; }
  int video_factor_of(int class_id) const { return class_id % num_video_factors; }

  void validate() const;
};

/// Noise-free sensor waveform for factor a: per-channel phase-shifted
/// sinusoid at a + 1 cycles over the window. Shape [channels x seq_len].
Tensor sensor_template(const SyntheticSpec& spec, int imu_factor);

/// Noise-free video pattern for factor b: a bright square translating in a
/// direction indexed by b. Shape [time x height x width x 3].
Tensor video_template(const SyntheticSpec& spec, int video_factor);

std::pair<DatasetIndex, DatasetIndex> generate_synthetic_dataset(const SyntheticSpec& spec,
                                                                 std::uint64_t seed);

/// Serializes a generated split (arrays + JSON header with spec and seed) as
/// a single .npz archive; load_synthetic_archive restores it.
void save_synthetic_archive(const std::string& path, const DatasetIndex& index,
                            const SyntheticSpec& spec, std::uint64_t seed);
DatasetIndex load_synthetic_archive(const std::string& path, SyntheticSpec* spec_out = nullptr,
                                    std::uint64_t* seed_out = nullptr);

}  // namespace mmhar
