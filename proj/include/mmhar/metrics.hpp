#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mmhar/tensor.hpp"

namespace mmhar {

/// Fraction of rows whose true label is among the k largest logits. Equal
/// logits rank by smaller class index, so the metric is deterministic.
double top_k_accuracy(const Tensor& logits, const std::vector<int>& labels, int k);

/// Unweighted mean over classes of 2PR/(P+R); a class with P+R = 0 (or no
/// presence at all) contributes 0 and is still counted in the mean.
double macro_f1(const std::vector<int>& predictions, const std::vector<int>& labels,
                int num_classes);

/// Row-wise argmax with smallest-index tie-breaking.
std::vector<int> argmax_rows(const Tensor& logits);

struct MetricsReport {
  double top1 = 0.0;
  double top5 = 0.0;
  double macro_f1 = 0.0;
  std::int64_t num_samples = 0;
  std::string config_hash;
  std::uint64_t seed = 0;
};

MetricsReport compute_metrics(const Tensor& logits, const std::vector<int>& labels,
                              int num_classes);

/// Per-class recall, [num_classes]; classes absent from labels get 0.
std::vector<double> per_class_recall(const std::vector<int>& predictions,
                                     const std::vector<int>& labels, int num_classes);

}  // namespace mmhar
