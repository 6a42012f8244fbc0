#include "mmhar/imu_encoder.hpp"

namespace mmhar {

void ImuEncoderConfig::validate() const {
  if (in_channels < 1) throw ConfigError("imu encoder: in_channels must be >= 1");
  for (int c : block_channels) {
    if (c < 1) throw ConfigError("imu encoder: block channels must be >= 1");
  }
  for (int k : kernel_sizes) {
    if (k < 1) throw ConfigError("imu encoder: kernel sizes must be >= 1");
  }
  if (dropout_rate < 0.0 || dropout_rate >= 1.0) {
    throw ConfigError("imu encoder: dropout_rate must be in [0, 1)");
  }
  if (expected_input_length > 0 && expected_input_length < min_input_length()) {
    throw ConfigError("imu encoder: expected input length " +
                      std::to_string(expected_input_length) + " is shorter than the " +
                      std::to_string(min_input_length()) +
                      " steps the kernel cascade consumes");
  }
}

ImuEncoder::ImuEncoder(ImuEncoderConfig config) : cfg_(config) { cfg_.validate(); }

const std::vector<std::string>& ImuEncoder::group_names() {
  static const std::vector<std::string> kNames{"block_1", "block_2", "block_3"};
  return kNames;
}

ModelParams ImuEncoder::init(std::uint64_t seed) const {
  ModelParams params;
  int in_ch = cfg_.in_channels;
  for (int blk = 0; blk < 3; ++blk) {
    const int out_ch = cfg_.block_channels[static_cast<std::size_t>(blk)];
    const int k = cfg_.kernel_sizes[static_cast<std::size_t>(blk)];
    Rng rng(derive_seed(seed, "imu/" + group_names()[static_cast<std::size_t>(blk)]));
    ParamGroup& g = params.add_group(group_names()[static_cast<std::size_t>(blk)]);
    g.add("weight", uniform_fan_in_init({out_ch, in_ch, k},
                                        static_cast<std::int64_t>(in_ch) * k, rng));
    g.add("bias", Tensor::zeros({out_ch}));
    in_ch = out_ch;
  }
  return params;
}

std::vector<std::int64_t> ImuEncoder::output_lengths(std::int64_t input_length) const {
  std::vector<std::int64_t> lengths;
  std::int64_t len = input_length;
  for (int blk = 0; blk < 3; ++blk) {
    len = len - cfg_.kernel_sizes[static_cast<std::size_t>(blk)] + 1;
    lengths.push_back(len);
  }
  return lengths;
}

Tensor ImuEncoder::forward(const ModelParams& params, const Tensor& batch, bool training_mode,
                           Rng* dropout_rng, Cache* cache) const {
  if (batch.rank() != 3 || batch.dim(1) != cfg_.in_channels) {
    throw ShapeError("imu encoder: batch must be [N, " + std::to_string(cfg_.in_channels) +
                     ", L], got " + batch.shape_string());
  }
  {
    std::int64_t len = batch.dim(2);
    for (int blk = 0; blk < 3; ++blk) {
      len = len - cfg_.kernel_sizes[static_cast<std::size_t>(blk)] + 1;
      if (len < 1) {
        throw ShapeError("imu encoder: input length " + std::to_string(batch.dim(2)) +
                         " leaves no output at " + group_names()[static_cast<std::size_t>(blk)] +
                         " (need >= " + std::to_string(cfg_.min_input_length()) + ")");
      }
    }
  }
  if (training_mode && cfg_.dropout_rate > 0.0 && dropout_rng == nullptr) {
    throw ContractError("imu encoder: training-mode forward needs a dropout rng");
  }

  Cache local;
  Cache& c = cache ? *cache : local;
  c.input = batch;

  Tensor h = batch;
  for (int blk = 0; blk < 3; ++blk) {
    const auto& g = params.group(group_names()[static_cast<std::size_t>(blk)]);
    c.conv_in[static_cast<std::size_t>(blk)] = h;
    Tensor z = conv1d_valid_forward(h, g.at("weight"), g.at("bias"));
    c.pre_drop[static_cast<std::size_t>(blk)] = z;
    if (training_mode && cfg_.dropout_rate > 0.0) {
      Tensor mask = dropout_mask(z.shape(), cfg_.dropout_rate, *dropout_rng);
      z = apply_mask(z, mask);
      c.drop_mask[static_cast<std::size_t>(blk)] = std::move(mask);
    }
    c.pre_relu[static_cast<std::size_t>(blk)] = z;
    h = relu(z);
  }
  c.pooled_in = h;
  return global_avg_pool1d(h);
}

void ImuEncoder::backward(const ModelParams& params, const Cache& cache, const Tensor& dfeatures,
                          ModelParams* grads, Tensor* dinput) const {
  Tensor dh = global_avg_pool1d_backward(cache.pooled_in, dfeatures);
  for (int blk = 2; blk >= 0; --blk) {
    const auto& name = group_names()[static_cast<std::size_t>(blk)];
    const auto& g = params.group(name);
    Tensor dz = relu_backward(cache.pre_relu[static_cast<std::size_t>(blk)], dh);
    if (!cache.drop_mask[static_cast<std::size_t>(blk)].empty()) {
      dz = apply_mask(dz, cache.drop_mask[static_cast<std::size_t>(blk)]);
    }

    const bool need_dx = blk > 0 || dinput != nullptr;
    Tensor dx;
    if (need_dx) dx = Tensor::zeros(cache.conv_in[static_cast<std::size_t>(blk)].shape());
    Tensor* dw = grads ? grad_ptr(*grads, name, "weight") : nullptr;
    Tensor* db = grads ? grad_ptr(*grads, name, "bias") : nullptr;
    conv1d_valid_backward(cache.conv_in[static_cast<std::size_t>(blk)], g.at("weight"), dz,
                          need_dx ? &dx : nullptr, dw, db);
    if (blk == 0) {
      if (dinput) *dinput = std::move(dx);
    } else {
      dh = std::move(dx);
    }
  }
}

}  // namespace mmhar
