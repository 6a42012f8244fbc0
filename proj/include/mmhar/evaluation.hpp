#pragma once

#include <string>

#include "mmhar/metrics.hpp"
#include "mmhar/training.hpp"

namespace mmhar {

/// Which modalities feed the model at evaluation time. A fused model under a
/// single-modality condition receives zero features for the other modality.
enum class EvalCondition { kImuOnly, kVideoOnly, kFused };

std::string to_string(EvalCondition c);

struct UnimodalModel {
  Modality modality = Modality::kImu;
  ImuEncoderConfig imu_config;
  VideoEncoderConfig video_config;
  MlpHeadConfig head_config;
  ModelParams encoder;
  ModelParams head;
};

/// Deterministic eval-mode pass over the full test index. Throws on an
/// empty test set.
MetricsReport evaluate_unimodal(const UnimodalModel& model, const DatasetIndex& test,
                                const SampleProvider& provider);

MetricsReport evaluate_fused(const FusedModel& model, const DatasetIndex& test,
                             const SampleProvider& provider, EvalCondition condition);

/// Logits for the whole index, in index order (shared by the evaluators and
/// by recall reporting).
Tensor fused_model_logits(const FusedModel& model, const DatasetIndex& test,
                          const SampleProvider& provider, EvalCondition condition);
Tensor unimodal_model_logits(const UnimodalModel& model, const DatasetIndex& test,
                             const SampleProvider& provider);

}  // namespace mmhar
