#include "mmhar/metrics.hpp"

#include <algorithm>
#include <numeric>

#include "mmhar/errors.hpp"

namespace mmhar {

std::vector<int> argmax_rows(const Tensor& logits) {
  const std::int64_t n = logits.dim(0), c = logits.dim(1);
  std::vector<int> out(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) {
    const double* row = logits.data() + i * c;
    int best = 0;
    for (std::int64_t j = 1; j < c; ++j) {
      if (row[j] > row[best]) best = static_cast<int>(j);
    }
    out[static_cast<std::size_t>(i)] = best;
  }
  return out;
}

double top_k_accuracy(const Tensor& logits, const std::vector<int>& labels, int k) {
  if (logits.rank() != 2) throw Error("top_k_accuracy: logits must be [N, C]");
  const std::int64_t n = logits.dim(0), c = logits.dim(1);
  if (k < 1 || k > c) {
    throw Error("top_k_accuracy: k = " + std::to_string(k) + " outside [1, " + std::to_string(c) +
                "]");
  }
  if (static_cast<std::int64_t>(labels.size()) != n) {
    throw Error("top_k_accuracy: label count does not match logit rows");
  }

  std::int64_t hits = 0;
  std::vector<int> order(static_cast<std::size_t>(c));
  for (std::int64_t i = 0; i < n; ++i) {
    const double* row = logits.data() + i * c;
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      if (row[a] != row[b]) return row[a] > row[b];
      return a < b;  // ties: smaller class index ranks first
    });
    const int label = labels[static_cast<std::size_t>(i)];
    for (int j = 0; j < k; ++j) {
      if (order[static_cast<std::size_t>(j)] == label) {
        ++hits;
        break;
      }
    }
  }
  return static_cast<double>(hits) / static_cast<double>(n);
}

double macro_f1(const std::vector<int>& predictions, const std::vector<int>& labels,
                int num_classes) {
  if (predictions.size() != labels.size()) {
    throw Error("macro_f1: predictions and labels differ in length");
  }
  if (num_classes < 1) throw Error("macro_f1: num_classes must be >= 1");

  std::vector<std::int64_t> tp(static_cast<std::size_t>(num_classes), 0);
  std::vector<std::int64_t> fp(static_cast<std::size_t>(num_classes), 0);
  std::vector<std::int64_t> fn(static_cast<std::size_t>(num_classes), 0);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const int pred = predictions[i];
    const int truth = labels[i];
    if (pred < 0 || pred >= num_classes || truth < 0 || truth >= num_classes) {
      throw Error("macro_f1: class id outside [0, " + std::to_string(num_classes) + ")");
    }
    if (pred == truth) {
      ++tp[static_cast<std::size_t>(pred)];
    } else {
      ++fp[static_cast<std::size_t>(pred)];
      ++fn[static_cast<std::size_t>(truth)];
    }
  }

  double sum = 0.0;
  for (int cls = 0; cls < num_classes; ++cls) {
    const auto c = static_cast<std::size_t>(cls);
    const double p_den = static_cast<double>(tp[c] + fp[c]);
    const double r_den = static_cast<double>(tp[c] + fn[c]);
    const double precision = p_den > 0.0 ? static_cast<double>(tp[c]) / p_den : 0.0;
    const double recall = r_den > 0.0 ? static_cast<double>(tp[c]) / r_den : 0.0;
    const double f1 =
        precision + recall > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
    sum += f1;
  }
  return sum / static_cast<double>(num_classes);
}

std::vector<double> per_class_recall(const std::vector<int>& predictions,
                                     const std::vector<int>& labels, int num_classes) {
  std::vector<std::int64_t> tp(static_cast<std::size_t>(num_classes), 0);
  std::vector<std::int64_t> support(static_cast<std::size_t>(num_classes), 0);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    ++support[static_cast<std::size_t>(labels[i])];
    if (predictions[i] == labels[i]) ++tp[static_cast<std::size_t>(labels[i])];
  }
  std::vector<double> recall(static_cast<std::size_t>(num_classes), 0.0);
  for (std::size_t c = 0; c < recall.size(); ++c) {
    if (support[c] > 0) recall[c] = static_cast<double>(tp[c]) / static_cast<double>(support[c]);
  }
  return recall;
}

MetricsReport compute_metrics(const Tensor& logits, const std::vector<int>& labels,
                              int num_classes) {
  MetricsReport report;
  report.num_samples = logits.dim(0);
  report.top1 = top_k_accuracy(logits, labels, 1);
  report.top5 = top_k_accuracy(logits, labels, std::min<int>(5, num_classes));
  report.macro_f1 = macro_f1(argmax_rows(logits), labels, num_classes);
  return report;
}

}  // namespace mmhar
