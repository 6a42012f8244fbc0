#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "mmhar/params.hpp"

namespace mmhar {

/// Adaptive-moment optimizer with decoupled weight decay.
struct OptimizerHyper {
  double learning_rate = 1e-3;
  double weight_decay = 0.0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamWState {
  std::int64_t step = 0;
  std::map<std::string, std::map<std::string, std::pair<Tensor, Tensor>>> moments;  // m, v
};

/// One update of every trainable array present in grads. Frozen groups in
/// grads are a contract violation; non-finite gradients raise TrainError.
/// With zero gradients the decoupled decay still scales each trainable
/// weight by (1 - lr * weight_decay).
void optimizer_step(ModelParams& params, const ModelParams& grads, AdamWState& state,
                    const OptimizerHyper& hyper);

}  // namespace mmhar
