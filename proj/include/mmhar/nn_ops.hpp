#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "mmhar/rng.hpp"
#include "mmhar/tensor.hpp"

namespace mmhar {

// Layer primitives with explicit backward passes. Batch-first layouts:
// 1-D:  x [N, C, L]      w [OC, C, K]             y [N, OC, L-K+1]
// 3-D:  x [N, C, T, H, W] w [OC, C, KT, KH, KW]   y per the usual
//       floor((in + 2*pad - kernel)/stride) + 1 arithmetic.

Tensor conv1d_valid_forward(const Tensor& x, const Tensor& w, const Tensor& b);
void conv1d_valid_backward(const Tensor& x, const Tensor& w, const Tensor& dy,
                           Tensor* dx, Tensor* dw, Tensor* db);

struct Conv3dGeom {
  std::array<int, 3> stride{1, 1, 1};
  std::array<int, 3> pad{0, 0, 0};
};

std::array<std::int64_t, 3> conv3d_output_dims(const std::array<std::int64_t, 3>& in,
                                               const std::array<std::int64_t, 3>& kernel,
                                               const Conv3dGeom& geom);

Tensor conv3d_forward(const Tensor& x, const Tensor& w, const Tensor* b, const Conv3dGeom& geom);
void conv3d_backward(const Tensor& x, const Tensor& w, const Tensor& dy, const Conv3dGeom& geom,
                     Tensor* dx, Tensor* dw, Tensor* db);

struct Pool3dGeom {
  std::array<int, 3> kernel{2, 2, 2};
  std::array<int, 3> stride{2, 2, 2};
  std::array<int, 3> pad{0, 0, 0};
};

struct MaxPool3dResult {
  Tensor y;
  std::vector<std::int64_t> argmax;  // flat offsets into x, one per y element
};

MaxPool3dResult maxpool3d_forward(const Tensor& x, const Pool3dGeom& geom);
Tensor maxpool3d_backward(const Tensor& x, const MaxPool3dResult& fwd, const Tensor& dy);

Tensor relu(const Tensor& x);
/// dx = dy masked by pre > 0.
Tensor relu_backward(const Tensor& pre, const Tensor& dy);

/// Inverted dropout mask: entries are 0 or 1/(1-rate).
Tensor dropout_mask(const std::vector<std::int64_t>& shape, double rate, Rng& rng);
Tensor apply_mask(const Tensor& x, const Tensor& mask);

Tensor global_avg_pool1d(const Tensor& x);                       // [N,C,L] -> [N,C]
Tensor global_avg_pool1d_backward(const Tensor& x, const Tensor& dfeat);
Tensor global_avg_pool3d(const Tensor& x);                       // [N,C,T,H,W] -> [N,C]
Tensor global_avg_pool3d_backward(const Tensor& x, const Tensor& dfeat);

/// Per-channel affine normalization with fixed statistics
/// (inference-style batch norm). x is [N, C, ...spatial].
Tensor batchnorm_fixed_forward(const Tensor& x, const Tensor& gamma, const Tensor& beta,
                               const Tensor& mean, const Tensor& var, double eps);
void batchnorm_fixed_backward(const Tensor& x, const Tensor& gamma, const Tensor& mean,
                              const Tensor& var, double eps, const Tensor& dy, Tensor* dx,
                              Tensor* dgamma, Tensor* dbeta);

Tensor linear_forward(const Tensor& x, const Tensor& w, const Tensor& b);  // [N,I]x[O,I]->[N,O]
void linear_backward(const Tensor& x, const Tensor& w, const Tensor& dy, Tensor* dx, Tensor* dw,
                     Tensor* db);

/// Mean over the batch of -log softmax(logits)[label], log-sum-exp
/// stabilized. dlogits (optional) receives (softmax - onehot)/N.
double softmax_cross_entropy(const Tensor& logits, const std::vector<int>& labels,
                             Tensor* dlogits = nullptr);

/// Row-wise softmax probabilities.
Tensor softmax(const Tensor& logits);

/// Fan-in scaled uniform init: U(-1/sqrt(fan_in), 1/sqrt(fan_in)).
Tensor uniform_fan_in_init(const std::vector<std::int64_t>& shape, std::int64_t fan_in, Rng& rng);

}  // namespace mmhar
