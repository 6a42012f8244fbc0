#pragma once

#include <string>

#include "mmhar/data_types.hpp"
#include "mmhar/preprocess.hpp"

namespace mmhar {

/// Resolves a sample to model-ready payloads. Implementations must be pure
/// with respect to the sample (safe to call from multiple workers).
class SampleProvider {
 public:
  virtual ~SampleProvider() = default;
  virtual SensorSequence sensor(const LabeledSample& sample) const = 0;
  virtual VideoClip video(const LabeledSample& sample) const = 0;
};

/// Serves the in-memory payloads carried by the samples themselves
/// (synthetic datasets, pre-materialized indexes).
class InlineProvider final : public SampleProvider {
 public:
  SensorSequence sensor(const LabeledSample& sample) const override;
  VideoClip video(const LabeledSample& sample) const override;
};

/// Decodes file-backed samples, applies the canonical preprocessing, and
/// optionally caches materialized arrays as one .npz per sample keyed by
/// (dataset, sample_id, preprocessing-config hash).
class FileProvider final : public SampleProvider {
 public:
  FileProvider(std::string dataset_name, PreprocessConfig config, std::string cache_dir = "");

  SensorSequence sensor(const LabeledSample& sample) const override;
  VideoClip video(const LabeledSample& sample) const override;

  const PreprocessConfig& config() const { return config_; }

 private:
  std::string dataset_name_;
  PreprocessConfig config_;
  std::string cache_dir_;
};

}  // namespace mmhar
