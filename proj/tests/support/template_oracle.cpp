#include "template_oracle.hpp"

#include <limits>
#include <vector>

namespace mmhar::testing {

namespace {

double sq_distance(const Tensor& a, const Tensor& b) {
  double acc = 0.0;
  for (std::int64_t i = 0; i < a.numel(); ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

}  // namespace

double nearest_template_accuracy(const SyntheticSpec& spec, const DatasetIndex& index,
                                 OracleModality modality) {
  std::vector<Tensor> sensor_tpls, video_tpls;
  for (int a = 0; a < spec.num_imu_factors; ++a) sensor_tpls.push_back(sensor_template(spec, a));
  for (int b = 0; b < spec.num_video_factors; ++b) video_tpls.push_back(video_template(spec, b));

  const int num_classes = spec.num_classes();
  double expected_hits = 0.0;

  for (const auto& sample : index.samples) {
    std::vector<double> dist(static_cast<std::size_t>(num_classes), 0.0);
    for (int c = 0; c < num_classes; ++c) {
      double d = 0.0;
      if (modality != OracleModality::kVideoOnly) {
        d += sq_distance(sample.sensor->values,
                         sensor_tpls[static_cast<std::size_t>(spec.imu_factor_of(c))]);
      }
      if (modality != OracleModality::kSensorOnly) {
        d += sq_distance(sample.video->frames,
                         video_tpls[static_cast<std::size_t>(spec.video_factor_of(c))]);
      }
      dist[static_cast<std::size_t>(c)] = d;
    }

    double best = std::numeric_limits<double>::infinity();
    for (double d : dist) best = std::min(best, d);
    int tie_size = 0;
    bool truth_in_argmin = false;
    for (int c = 0; c < num_classes; ++c) {
      if (dist[static_cast<std::size_t>(c)] == best) {
        ++tie_size;
        if (c == sample.class_id) truth_in_argmin = true;
      }
    }
    if (truth_in_argmin) expected_hits += 1.0 / tie_size;
  }
  return expected_hits / static_cast<double>(index.samples.size());
}

}  // namespace mmhar::testing
