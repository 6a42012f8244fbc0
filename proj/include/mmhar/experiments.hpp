#pragma once

#include <set>
#include <string>
#include <vector>

#include "mmhar/evaluation.hpp"
#include "mmhar/training.hpp"
#include "mmhar/transforms.hpp"

namespace mmhar {

/// Everything needed to run the two-stage pipeline once. All internal seeds
/// derive from `seed`, so two runs with an identical spec are bit-identical.
struct PipelineSpec {
  ImuEncoderConfig imu;
  VideoEncoderConfig video;
  int stage1_head_hidden = 64;
  int fusion_head_hidden = 64;
  TrainHyperparams stage1_imu_hyper;
  TrainHyperparams stage1_video_hyper;
  TrainHyperparams stage2_hyper;
  std::uint64_t seed = 0;
};

struct TwoStageArtifacts {
  Stage1Result imu_stage1;
  Stage1Result video_stage1;
  Stage2Result fused;
};

/// Stage 1 for both encoders, then stage 2 joint fine-tuning with a fresh
/// fusion head.
TwoStageArtifacts run_two_stage(const PipelineSpec& spec, const DatasetIndex& train,
                                const SampleProvider& provider);

Stage1Result run_stage1_only(const PipelineSpec& spec, Modality modality,
                             const DatasetIndex& train, const SampleProvider& provider);

UnimodalModel unimodal_from_stage1(const PipelineSpec& spec, Modality modality,
                                   const Stage1Result& stage1);

// ---------------------------------------------------------------------------
// Data-ratio sweep

struct SweepCell {
  double ratio = 1.0;
  std::uint64_t seed = 0;
  EvalCondition condition = EvalCondition::kFused;
  MetricsReport report;
  std::string error;  // non-empty when this cell failed; other cells continue
};

/// For each (ratio, seed): stratified-subset the training split, run the
/// full two-stage pipeline, and evaluate IMU-only / RGB-only / FUSED on the
/// untouched test split.
std::vector<SweepCell> run_data_ratio_sweep(const PipelineSpec& base, const DatasetIndex& train,
                                            const DatasetIndex& test,
                                            const SampleProvider& provider,
                                            const std::vector<double>& ratios,
                                            const std::vector<std::uint64_t>& seeds);

// ---------------------------------------------------------------------------
// Zero-shot modality masking

enum class MaskedModalityChoice { kImu, kVideo, kBoth };

MaskedModalityChoice masked_modality_from_string(const std::string& name);

struct ZeroShotCell {
  int hidden_count = 0;
  std::string condition_label;  // IMU-only, RGB-only, IMU*+RGB, RGB*+IMU
  std::set<int> hidden_classes;
  MetricsReport report;
  std::vector<double> hidden_class_recall;  // aligned with sorted hidden_classes
  std::vector<ConsumptionRecord> audit;
  std::vector<std::string> masked_sample_ids;
};

struct ZeroShotReport {
  std::vector<ZeroShotCell> cells;
};

/// For each hidden count: pick hidden classes from a seeded stream (shared
/// across conditions), mask them out of the chosen modality before stage 1,
/// keep the mask through stage 2, and evaluate on the full test set.
/// `choice` selects the starred modality; kBoth runs all four conditions.
ZeroShotReport run_zero_shot_experiment(const PipelineSpec& base, const DatasetIndex& train,
                                        const DatasetIndex& test, const SampleProvider& provider,
                                        const std::vector<int>& hidden_counts,
                                        MaskedModalityChoice choice);

}  // namespace mmhar
