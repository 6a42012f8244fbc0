#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "mmhar/params.hpp"

namespace mmhar {

/// Saves a parameter set as a named-array archive ("<group>/<name>" entries)
/// with a JSON header recording group order, trainability, and caller
/// metadata under "meta".
void save_params_archive(const std::string& path, const ModelParams& params,
                         const nlohmann::json& meta = {});

/// Restores a parameter set saved by save_params_archive. The optional
/// meta_out receives the stored "meta" object.
ModelParams load_params_archive(const std::string& path, nlohmann::json* meta_out = nullptr);

struct FusedModel;
struct Stage1Result;
struct UnimodalModel;
enum class Modality;
struct ImuEncoderConfig;
struct VideoEncoderConfig;

/// Fused-model checkpoint: one archive bundling the IMU encoder, video
/// encoder, fusion head (group names prefixed imu/, video/, head/), and all
/// three configs in the header.
void save_fused_checkpoint(const std::string& path, const FusedModel& model);
FusedModel load_fused_checkpoint(const std::string& path);

/// Stage-1 checkpoint: encoder + its classification head + configs.
void save_stage1_checkpoint(const std::string& path, Modality modality,
                            const ImuEncoderConfig& imu_config,
                            const VideoEncoderConfig& video_config, const Stage1Result& result);
UnimodalModel load_stage1_checkpoint(const std::string& path);

}  // namespace mmhar
