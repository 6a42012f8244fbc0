#include "mmhar/mini3d.hpp"

namespace mmhar {

namespace {
const Conv3dGeom kBlockGeom{{1, 2, 2}, {1, 1, 1}};  // temporal stride 1, spatial stride 2
constexpr int kKernel = 3;
}  // namespace

Mini3dEncoder::Mini3dEncoder(std::array<int, 3> channels, std::array<std::int64_t, 3> input_shape)
    : channels_(channels), input_shape_(input_shape) {
  for (int c : channels_) {
    if (c < 1) throw ConfigError("mini3d: channels must be >= 1");
  }
  if (input_shape_[0] < 1 || input_shape_[1] < 4 || input_shape_[2] < 4) {
    throw ConfigError("mini3d: input shape must be at least [1 x 4 x 4]");
  }
}

const std::vector<std::string>& Mini3dEncoder::group_names() {
  static const std::vector<std::string> kNames{"Block_1", "Block_2", "Block_3"};
  return kNames;
}

ModelParams Mini3dEncoder::init(std::uint64_t seed) const {
  ModelParams params;
  int in_ch = 3;
  for (int blk = 0; blk < 3; ++blk) {
    const int out_ch = channels_[static_cast<std::size_t>(blk)];
    Rng rng(derive_seed(seed, "mini3d/" + group_names()[static_cast<std::size_t>(blk)]));
    ParamGroup& g = params.add_group(group_names()[static_cast<std::size_t>(blk)]);
    g.add("weight", uniform_fan_in_init({out_ch, in_ch, kKernel, kKernel, kKernel},
                                        static_cast<std::int64_t>(in_ch) * kKernel * kKernel * kKernel,
                                        rng));
    g.add("bias", Tensor::zeros({out_ch}));
    in_ch = out_ch;
  }
  return params;
}

Tensor Mini3dEncoder::forward(const ModelParams& params, const Tensor& batch, Cache* cache) const {
  if (batch.rank() != 5 || batch.dim(1) != 3) {
    throw ShapeError("mini3d: batch must be [N, 3, T, H, W], got " + batch.shape_string());
  }
  if (batch.dim(2) != input_shape_[0] || batch.dim(3) != input_shape_[1] ||
      batch.dim(4) != input_shape_[2]) {
    throw ShapeError("mini3d: clip shape " + Tensor::shape_string({batch.dim(2), batch.dim(3), batch.dim(4)}) +
                     " does not match configured input " + Tensor::shape_string({input_shape_[0], input_shape_[1], input_shape_[2]}));
  }

  Cache local;
  Cache& c = cache ? *cache : local;

  Tensor h = batch;
  for (int blk = 0; blk < 3; ++blk) {
    const auto& g = params.group(group_names()[static_cast<std::size_t>(blk)]);
    c.conv_in[static_cast<std::size_t>(blk)] = h;
    Tensor z = conv3d_forward(h, g.at("weight"), &g.at("bias"), kBlockGeom);
    c.pre_relu[static_cast<std::size_t>(blk)] = z;
    h = relu(z);
  }
  c.pooled_in = h;
  return global_avg_pool3d(h);
}

void Mini3dEncoder::backward(const ModelParams& params, const Cache& cache,
                             const Tensor& dfeatures, ModelParams* grads) const {
  Tensor dh = global_avg_pool3d_backward(cache.pooled_in, dfeatures);
  for (int blk = 2; blk >= 0; --blk) {
    const auto& name = group_names()[static_cast<std::size_t>(blk)];
    const auto& g = params.group(name);
    Tensor dz = relu_backward(cache.pre_relu[static_cast<std::size_t>(blk)], dh);

    Tensor dx;
    const bool need_dx = blk > 0;
    if (need_dx) dx = Tensor::zeros(cache.conv_in[static_cast<std::size_t>(blk)].shape());
    Tensor* dw = grads ? grad_ptr(*grads, name, "weight") : nullptr;
    Tensor* db = grads ? grad_ptr(*grads, name, "bias") : nullptr;
    conv3d_backward(cache.conv_in[static_cast<std::size_t>(blk)], g.at("weight"), dz, kBlockGeom,
                    need_dx ? &dx : nullptr, dw, db);
    if (need_dx) dh = std::move(dx);
  }
}

}  // namespace mmhar
