#pragma once

#include <string>
#include <utility>
#include <vector>

#include "mmhar/data_types.hpp"

namespace mmhar {

struct LoadOptions {
  /// When true, a sample indexed with one modality but missing the other
  /// raises a LoadError naming the sample. When false (default), such
  /// samples keep their available modality and the gap is recorded in the
  /// skip manifest.
  bool require_both_modalities = false;
};

struct LoadedDataset {
  DatasetIndex train;
  DatasetIndex test;
  /// One line per skipped or degraded sample: "<sample_id>: <reason>".
  std::vector<std::string> manifest;
};

/// UTD-MHAD cross-subject protocol: odd subjects {1,3,5,7} train, even
/// subjects {2,4,6,8} test, 27 action classes. Expects
/// <root>/Inertial/a{A}_s{S}_t{T}_inertial.mat and
/// <root>/RGB/a{A}_s{S}_t{T}_color.avi.
LoadedDataset load_utd_mhad(const std::string& root_path, const LoadOptions& options = {});

/// MMAct cross-subject protocol: subjects 1-16 train, 17-20 test. Expects
/// <root>/video/subject{S}/.../<action>.mp4 plus sensor CSV trees
/// <root>/{acc_phone_clip,acc_watch_clip,gyro_clip,orientation_clip}/...
LoadedDataset load_mmact(const std::string& root_path, const LoadOptions& options = {});

/// Raw decoders (no preprocessing applied).

/// Reads the first 2-D numeric matrix from a MATLAB v5 .mat file,
/// transposed to row-major. Returns the variable name via name_out.
Tensor read_mat5_matrix(const std::string& path, std::string* name_out = nullptr);

/// UTD-MHAD inertial file: d_iner [N x 6] at 50 Hz -> [6 x N] SensorSequence.
SensorSequence read_utd_inertial(const std::string& path);

/// One MMAct sensor CSV (rows of x,y,z with optional leading timestamp)
/// -> [3 x N] SensorSequence at the given rate.
SensorSequence read_mmact_csv(const std::string& path, double rate_hz);

/// Stacks several sensor streams into one sequence: each stream is resampled
/// to target_rate_hz, truncated to the shortest stream, then channel-stacked.
SensorSequence stack_sensor_streams(const std::vector<SensorSequence>& streams,
                                    double target_rate_hz);

/// Decodes a video file (OpenCV) to frames in [0,1].
VideoClip read_video_file(const std::string& path);

/// Writes a clip as an MJPG .avi (used by tests and tooling).
void write_video_file(const std::string& path, const VideoClip& clip);

}  // namespace mmhar
