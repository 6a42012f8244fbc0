#include "mmhar/evaluation.hpp"

#include <algorithm>

namespace mmhar {

namespace {
constexpr std::size_t kEvalChunk = 64;

std::vector<int> index_labels(const DatasetIndex& test) {
  std::vector<int> labels;
  labels.reserve(test.samples.size());
  for (const auto& s : test.samples) labels.push_back(s.class_id);
  return labels;
}
}  // namespace

std::string to_string(EvalCondition c) {
  switch (c) {
    case EvalCondition::kImuOnly: return "IMU-only";
    case EvalCondition::kVideoOnly: return "RGB-only";
    case EvalCondition::kFused: return "FUSED";
  }
  return "?";
}

Tensor unimodal_model_logits(const UnimodalModel& model, const DatasetIndex& test,
                             const SampleProvider& provider) {
  if (test.samples.empty()) throw Error("evaluate: empty test set");
  const MlpHead head(model.head_config);
  const ImuEncoder imu_encoder(model.imu_config);
  const VideoEncoder video_encoder(model.video_config);

  Tensor logits({static_cast<std::int64_t>(test.samples.size()), model.head_config.num_classes});
  for (std::size_t start = 0; start < test.samples.size(); start += kEvalChunk) {
    const std::size_t end = std::min(test.samples.size(), start + kEvalChunk);
    std::vector<const LabeledSample*> chunk;
    for (std::size_t i = start; i < end; ++i) chunk.push_back(&test.samples[i]);

    Tensor feats;
    if (model.modality == Modality::kImu) {
      feats = imu_encoder.forward(model.encoder, make_sensor_batch(chunk, provider), false);
    } else {
      feats = video_encoder.forward(model.encoder, make_video_batch(chunk, provider));
    }
    const Tensor out = head.forward(model.head, feats);
    std::copy(out.data(), out.data() + out.numel(),
              logits.data() + static_cast<std::int64_t>(start) * model.head_config.num_classes);
  }
  return logits;
}

Tensor fused_model_logits(const FusedModel& model, const DatasetIndex& test,
                          const SampleProvider& provider, EvalCondition condition) {
  if (test.samples.empty()) throw Error("evaluate: empty test set");
  const MlpHead head(model.head_config);
  const ImuEncoder imu_encoder(model.imu_config);
  const VideoEncoder video_encoder(model.video_config);
  const std::int64_t d1 = model.imu_config.feature_dim();
  const std::int64_t d2 = model.video_config.feature_dim();

  const bool use_imu = condition != EvalCondition::kVideoOnly;
  const bool use_video = condition != EvalCondition::kImuOnly;

  Tensor logits({static_cast<std::int64_t>(test.samples.size()), model.head_config.num_classes});
  for (std::size_t start = 0; start < test.samples.size(); start += kEvalChunk) {
    const std::size_t end = std::min(test.samples.size(), start + kEvalChunk);
    const auto n = static_cast<std::int64_t>(end - start);

    Tensor imu_feat({n, d1});
    Tensor video_feat({n, d2});
    std::vector<const LabeledSample*> imu_samples, video_samples;
    std::vector<std::int64_t> imu_rows, video_rows;
    for (std::size_t i = start; i < end; ++i) {
      const LabeledSample& s = test.samples[i];
      const auto row = static_cast<std::int64_t>(i - start);
      if (use_imu && s.has_sensor()) {
        imu_samples.push_back(&s);
        imu_rows.push_back(row);
      }
      if (use_video && s.has_video()) {
        video_samples.push_back(&s);
        video_rows.push_back(row);
      }
    }
    if (!imu_samples.empty()) {
      const Tensor sub = imu_encoder.forward(model.imu, make_sensor_batch(imu_samples, provider),
                                             false);
      for (std::size_t r = 0; r < imu_rows.size(); ++r) {
        std::copy(sub.data() + static_cast<std::int64_t>(r) * d1,
                  sub.data() + static_cast<std::int64_t>(r + 1) * d1,
                  imu_feat.data() + imu_rows[r] * d1);
      }
    }
    if (!video_samples.empty()) {
      const Tensor sub =
          video_encoder.forward(model.video, make_video_batch(video_samples, provider));
      for (std::size_t r = 0; r < video_rows.size(); ++r) {
        std::copy(sub.data() + static_cast<std::int64_t>(r) * d2,
                  sub.data() + static_cast<std::int64_t>(r + 1) * d2,
                  video_feat.data() + video_rows[r] * d2);
      }
    }

    const Tensor out = head.forward(model.head, fuse_features(imu_feat, video_feat));
    std::copy(out.data(), out.data() + out.numel(),
              logits.data() + static_cast<std::int64_t>(start) * model.head_config.num_classes);
  }
  return logits;
}

MetricsReport evaluate_unimodal(const UnimodalModel& model, const DatasetIndex& test,
                                const SampleProvider& provider) {
  const Tensor logits = unimodal_model_logits(model, test, provider);
  return compute_metrics(logits, index_labels(test), test.num_classes);
}

MetricsReport evaluate_fused(const FusedModel& model, const DatasetIndex& test,
                             const SampleProvider& provider, EvalCondition condition) {
  const Tensor logits = fused_model_logits(model, test, provider, condition);
  return compute_metrics(logits, index_labels(test), test.num_classes);
}

}  // namespace mmhar
