#pragma once

#include <cmath>
#include <functional>
#include <string>

#include "mmhar/params.hpp"

namespace mmhar::testing {

struct GradCheckStats {
  int checked = 0;
  int passed = 0;
  double worst_rel_error = 0.0;
  std::string worst_coordinate;

  double pass_fraction() const {
    return checked ? static_cast<double>(passed) / checked : 1.0;
  }
};

/// Central-difference check of analytic parameter gradients: perturbs every
/// non-buffer coordinate of every trainable group (optionally strided) and
/// compares (f(x+h) - f(x-h)) / 2h against the supplied analytic gradient.
/// A coordinate passes when |analytic - numeric| <= tol * max(1e-8, |analytic| + |numeric|).
inline GradCheckStats check_gradients(ModelParams& params, const ModelParams& analytic,
                                      const std::function<double()>& loss_fn, double step = 1e-4,
                                      double tol = 1e-3, std::int64_t stride = 1) {
  GradCheckStats stats;
  for (const auto& gname : analytic.group_order) {
    const ParamGroup& ggrad = analytic.group(gname);
    for (const auto& pname : ggrad.order) {
      if (is_buffer_name(pname)) continue;
      Tensor& value = params.param(gname, pname);
      const Tensor& grad = ggrad.at(pname);
      for (std::int64_t i = 0; i < value.numel(); i += stride) {
        const double saved = value[i];
        value[i] = saved + step;
        const double up = loss_fn();
        value[i] = saved - step;
        const double down = loss_fn();
        value[i] = saved;

        const double numeric = (up - down) / (2.0 * step);
        const double a = grad[i];
        const double scale = std::max(1e-8, std::abs(a) + std::abs(numeric));
        const double rel = std::abs(a - numeric) / scale;
        ++stats.checked;
        if (rel <= tol) {
          ++stats.passed;
        }
        if (rel > stats.worst_rel_error) {
          stats.worst_rel_error = rel;
          stats.worst_coordinate = gname + "/" + pname + "[" + std::to_string(i) + "]";
        }
      }
    }
  }
  return stats;
}

}  // namespace mmhar::testing
