#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mmhar/data_types.hpp"
#include "mmhar/fusion.hpp"
#include "mmhar/imu_encoder.hpp"
#include "mmhar/optimizer.hpp"
#include "mmhar/sample_provider.hpp"
#include "mmhar/video_encoder.hpp"

namespace mmhar {

struct TrainHyperparams {
  double learning_rate = 1e-3;
  double weight_decay = 1e-6;
  int batch_size = 32;
  int max_epochs = 50;
  int patience = 10;          // epochs without val improvement before stopping
  double val_fraction = 0.1;  // stratified carve-out from the training split
  std::uint64_t seed = 0;     // batch order + dropout stream

  void validate() const;
};

/// One (sample, modality) consumption during training; the audit trail for
/// the leak-freedom guarantee.
struct ConsumptionRecord {
  std::string sample_id;
  Modality modality;
  int stage = 1;
  int epoch = 0;
};

struct EpochStats {
  int epoch = 0;
  double train_loss = 0.0;
  double val_top1 = 0.0;
};

struct TrainingRun {
  std::vector<EpochStats> history;
  std::vector<ConsumptionRecord> audit;
  int best_epoch = -1;
  int epochs_run = 0;
};

struct Stage1Config {
  Modality modality = Modality::kImu;
  ImuEncoderConfig imu;
  VideoEncoderConfig video;
  int head_hidden_dim = 64;
  TrainHyperparams hyper;
  std::uint64_t init_seed = 0;
};

struct Stage1Result {
  ModelParams encoder;
  ModelParams head;
  MlpHeadConfig head_config;
  TrainingRun run;
};

/// Supervised pre-training of one encoder with its own classification head.
/// Only samples whose modality_mask includes the chosen modality are
/// consumed (enforced and logged). Throws TrainError when the eligible set
/// is empty or the loss diverges.
Stage1Result train_stage1(const Stage1Config& config, const DatasetIndex& trainset,
                          const SampleProvider& provider);

struct FusedModel {
  ImuEncoderConfig imu_config;
  VideoEncoderConfig video_config;
  MlpHeadConfig head_config;
  ModelParams imu;
  ModelParams video;
  ModelParams head;
};

struct Stage2Config {
  ImuEncoderConfig imu;
  VideoEncoderConfig video;  // trainable_groups = fine-tuned video layers
  int head_hidden_dim = 64;
  TrainHyperparams hyper;
  std::uint64_t head_seed = 0;  // the fusion head is freshly initialized
};

struct Stage2Result {
  FusedModel model;
  TrainingRun run;
};

/// Joint fine-tuning: fresh fusion head + all IMU groups + the named video
/// groups train; every other video group stays bitwise frozen. Samples
/// missing a modality under their mask contribute a zero feature vector for
/// that modality and propagate no gradient into its encoder.
Stage2Result train_stage2(const Stage2Config& config, ModelParams imu_params,
                          ModelParams video_params, const DatasetIndex& trainset,
                          const SampleProvider& provider);

/// Batch assembly (shape-checked): [N, C, L] sensors / [N, 3, T, H, W] clips.
Tensor make_sensor_batch(const std::vector<const LabeledSample*>& samples,
                         const SampleProvider& provider);
Tensor make_video_batch(const std::vector<const LabeledSample*>& samples,
                        const SampleProvider& provider);

}  // namespace mmhar
