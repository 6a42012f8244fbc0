#include "mmhar/s3d.hpp"

#include <algorithm>

namespace mmhar {

namespace {

constexpr double kBnEps = 1e-3;

Tensor concat_channels(const std::vector<Tensor>& parts) {
  const std::int64_t n = parts[0].dim(0);
  const std::int64_t t = parts[0].dim(2), h = parts[0].dim(3), w = parts[0].dim(4);
  std::int64_t total_c = 0;
  for (const auto& p : parts) total_c += p.dim(1);

  Tensor out({n, total_c, t, h, w});
  const std::int64_t spatial = t * h * w;
  for (std::int64_t i = 0; i < n; ++i) {
    std::int64_t c_off = 0;
    for (const auto& p : parts) {
      const std::int64_t pc = p.dim(1);
      const double* src = p.data() + i * pc * spatial;
      double* dst = out.data() + (i * total_c + c_off) * spatial;
      std::copy(src, src + pc * spatial, dst);
      c_off += pc;
    }
  }
  return out;
}

std::vector<Tensor> split_channels(const Tensor& x, const std::vector<std::int64_t>& sizes) {
  const std::int64_t n = x.dim(0), total_c = x.dim(1);
  const std::int64_t spatial = x.dim(2) * x.dim(3) * x.dim(4);
  std::vector<Tensor> parts;
  std::int64_t c_off = 0;
  for (std::int64_t pc : sizes) {
    Tensor part({n, pc, x.dim(2), x.dim(3), x.dim(4)});
    for (std::int64_t i = 0; i < n; ++i) {
      const double* src = x.data() + (i * total_c + c_off) * spatial;
      std::copy(src, src + pc * spatial, part.data() + i * pc * spatial);
    }
    c_off += pc;
    parts.push_back(std::move(part));
  }
  return parts;
}

struct ConvBnSpec {
  std::string prefix;  // "" or "b1b/spatial/" etc., inside the stage's group
  int in_ch, out_ch;
  std::array<std::int64_t, 3> kernel;
  Conv3dGeom geom;
};

}  // namespace

struct S3dEncoder::Stage {
  enum Kind { kConvBn, kSepConv, kInception, kMaxPool } kind;
  std::string group;
  int in_ch = 0, out_ch = 0;
  int kernel = 1, stride = 1, pad = 0;       // kConvBn / kSepConv
  std::array<int, 6> mix{};                  // kInception: n0, n1a, n1b, n2a, n2b, n3
  Pool3dGeom pool{};

  std::vector<ConvBnSpec> conv_specs() const {
    std::vector<ConvBnSpec> specs;
    if (kind == kConvBn) {
      specs.push_back({"", in_ch, out_ch, {1, 1, 1}, Conv3dGeom{{1, 1, 1}, {0, 0, 0}}});
    } else if (kind == kSepConv) {
      specs.push_back({"spatial/", in_ch, out_ch,
                       {1, kernel, kernel},
                       Conv3dGeom{{1, stride, stride}, {0, pad, pad}}});
      specs.push_back({"temporal/", out_ch, out_ch,
                       {kernel, 1, 1},
                       Conv3dGeom{{stride, 1, 1}, {pad, 0, 0}}});
    } else if (kind == kInception) {
      const Conv3dGeom one{{1, 1, 1}, {0, 0, 0}};
      const Conv3dGeom sep_s{{1, 1, 1}, {0, 1, 1}};
      const Conv3dGeom sep_t{{1, 1, 1}, {1, 0, 0}};
      specs.push_back({"b0/", in_ch, mix[0], {1, 1, 1}, one});
      specs.push_back({"b1a/", in_ch, mix[1], {1, 1, 1}, one});
      specs.push_back({"b1b/spatial/", mix[1], mix[2], {1, 3, 3}, sep_s});
      specs.push_back({"b1b/temporal/", mix[2], mix[2], {3, 1, 1}, sep_t});
      specs.push_back({"b2a/", in_ch, mix[3], {1, 1, 1}, one});
      specs.push_back({"b2b/spatial/", mix[3], mix[4], {1, 3, 3}, sep_s});
      specs.push_back({"b2b/temporal/", mix[4], mix[4], {3, 1, 1}, sep_t});
      specs.push_back({"b3/", in_ch, mix[5], {1, 1, 1}, one});
    }
    return specs;
  }
};

namespace {

Tensor convbn_forward(const ParamGroup& g, const ConvBnSpec& spec, const Tensor& x,
                      S3dEncoder::ConvBnCache* cache) {
  Tensor conv_out = conv3d_forward(x, g.at(spec.prefix + "conv/weight"), nullptr, spec.geom);
  Tensor bn_out = batchnorm_fixed_forward(conv_out, g.at(spec.prefix + "bn/gamma"),
                                          g.at(spec.prefix + "bn/beta"),
                                          g.at(spec.prefix + "bn/running_mean"),
                                          g.at(spec.prefix + "bn/running_var"), kBnEps);
  Tensor y = relu(bn_out);
  if (cache) {
    cache->conv_in = x;
    cache->conv_out = std::move(conv_out);
    cache->bn_out = std::move(bn_out);
  }
  return y;
}

Tensor convbn_backward(const ParamGroup& g, const std::string& group_name, const ConvBnSpec& spec,
                       const S3dEncoder::ConvBnCache& cache, const Tensor& dy,
                       ModelParams* grads) {
  Tensor dbn = relu_backward(cache.bn_out, dy);
  Tensor dconv = Tensor::zeros(cache.conv_out.shape());
  Tensor* dgamma = grads ? grad_ptr(*grads, group_name, spec.prefix + "bn/gamma") : nullptr;
  Tensor* dbeta = grads ? grad_ptr(*grads, group_name, spec.prefix + "bn/beta") : nullptr;
  batchnorm_fixed_backward(cache.conv_out, g.at(spec.prefix + "bn/gamma"),
                           g.at(spec.prefix + "bn/running_mean"),
                           g.at(spec.prefix + "bn/running_var"), kBnEps, dbn, &dconv, dgamma,
                           dbeta);
  Tensor dx = Tensor::zeros(cache.conv_in.shape());
  Tensor* dw = grads ? grad_ptr(*grads, group_name, spec.prefix + "conv/weight") : nullptr;
  conv3d_backward(cache.conv_in, g.at(spec.prefix + "conv/weight"), dconv, spec.geom, &dx, dw,
                  nullptr);
  return dx;
}

}  // namespace

S3dEncoder::S3dEncoder() {
  const Pool3dGeom spatial_pool{{1, 3, 3}, {1, 2, 2}, {0, 1, 1}};
  const Pool3dGeom cube_pool{{3, 3, 3}, {2, 2, 2}, {1, 1, 1}};
  const Pool3dGeom half_pool{{2, 2, 2}, {2, 2, 2}, {0, 0, 0}};

  auto sep = [](std::string group, int in, int out, int k, int s, int p) {
    Stage st{Stage::kSepConv, std::move(group)};
    st.in_ch = in;
    st.out_ch = out;
    st.kernel = k;
    st.stride = s;
    st.pad = p;
    return st;
  };
  auto basic = [](std::string group, int in, int out) {
    Stage st{Stage::kConvBn, std::move(group)};
    st.in_ch = in;
    st.out_ch = out;
    return st;
  };
  auto mixed = [](std::string group, int in, std::array<int, 6> mix) {
    Stage st{Stage::kInception, std::move(group)};
    st.in_ch = in;
    st.mix = mix;
    st.out_ch = mix[0] + mix[2] + mix[4] + mix[5];
    return st;
  };
  auto pool = [](Pool3dGeom geom) {
    Stage st{Stage::kMaxPool, ""};
    st.pool = geom;
    return st;
  };

  stages_ = {
      sep("Conv_1a", 3, 64, 7, 2, 3),
      pool(spatial_pool),
      basic("Conv_2b", 64, 64),
      sep("Conv_2c", 64, 192, 3, 1, 1),
      pool(spatial_pool),
      mixed("Mixed_3b", 192, {64, 96, 128, 16, 32, 32}),
      mixed("Mixed_3c", 256, {128, 128, 192, 32, 96, 64}),
      pool(cube_pool),
      mixed("Mixed_4b", 480, {192, 96, 208, 16, 48, 64}),
      mixed("Mixed_4c", 512, {160, 112, 224, 24, 64, 64}),
      mixed("Mixed_4d", 512, {128, 128, 256, 24, 64, 64}),
      mixed("Mixed_4e", 512, {112, 144, 288, 32, 64, 64}),
      mixed("Mixed_4f", 528, {256, 160, 320, 32, 128, 128}),
      pool(half_pool),
      mixed("Mixed_5b", 832, {256, 160, 320, 32, 128, 128}),
      mixed("Mixed_5c", 832, {384, 192, 384, 48, 128, 128}),
  };
  for (const auto& st : stages_) {
    if (!st.group.empty()) group_names_.push_back(st.group);
  }
}

S3dEncoder::~S3dEncoder() = default;
S3dEncoder::S3dEncoder(const S3dEncoder&) = default;
S3dEncoder::S3dEncoder(S3dEncoder&&) noexcept = default;
S3dEncoder& S3dEncoder::operator=(const S3dEncoder&) = default;
S3dEncoder& S3dEncoder::operator=(S3dEncoder&&) noexcept = default;

const std::vector<std::string>& S3dEncoder::group_names() const { return group_names_; }

ModelParams S3dEncoder::init(std::uint64_t seed) const {
  ModelParams params;
  for (const auto& st : stages_) {
    if (st.group.empty()) continue;
    ParamGroup& g = params.add_group(st.group);
    for (const auto& spec : st.conv_specs()) {
      Rng rng(derive_seed(seed, "s3d/" + st.group + "/" + spec.prefix));
      const std::int64_t fan_in =
          static_cast<std::int64_t>(spec.in_ch) * spec.kernel[0] * spec.kernel[1] * spec.kernel[2];
      g.add(spec.prefix + "conv/weight",
            uniform_fan_in_init({spec.out_ch, spec.in_ch, spec.kernel[0], spec.kernel[1],
                                 spec.kernel[2]},
                                fan_in, rng));
      g.add(spec.prefix + "bn/gamma", Tensor::full({spec.out_ch}, 1.0));
      g.add(spec.prefix + "bn/beta", Tensor::zeros({spec.out_ch}));
      g.add(spec.prefix + "bn/running_mean", Tensor::zeros({spec.out_ch}));
      g.add(spec.prefix + "bn/running_var", Tensor::full({spec.out_ch}, 1.0));
    }
  }
  return params;
}

Tensor S3dEncoder::forward(const ModelParams& params, const Tensor& batch, Cache* cache) const {
  if (batch.rank() != 5 || batch.dim(1) != 3) {
    throw ShapeError("s3d: batch must be [N, 3, T, H, W], got " + batch.shape_string());
  }
  if (batch.dim(2) < 8 || batch.dim(3) < 32 || batch.dim(4) < 32) {
    throw ShapeError("s3d: clip must be at least 8 x 32 x 32, got " +
                     Tensor::shape_string({batch.dim(2), batch.dim(3), batch.dim(4)}));
  }

  Cache local;
  Cache& c = cache ? *cache : local;
  c.stages.clear();
  c.stages.resize(stages_.size());

  const Pool3dGeom branch_pool{{3, 3, 3}, {1, 1, 1}, {1, 1, 1}};

  Tensor h = batch;
  for (std::size_t si = 0; si < stages_.size(); ++si) {
    const Stage& st = stages_[si];
    StageCache& sc = c.stages[si];
    switch (st.kind) {
      case Stage::kMaxPool: {
        sc.input = h;
        MaxPool3dResult res = maxpool3d_forward(h, st.pool);
        h = res.y;
        sc.pool = std::move(res);
        break;
      }
      case Stage::kConvBn:
      case Stage::kSepConv: {
        const auto specs = st.conv_specs();
        sc.cbs.resize(specs.size());
        const ParamGroup& g = params.group(st.group);
        for (std::size_t k = 0; k < specs.size(); ++k) {
          h = convbn_forward(g, specs[k], h, &sc.cbs[k]);
        }
        break;
      }
      case Stage::kInception: {
        const auto specs = st.conv_specs();  // b0, b1a, b1b_s, b1b_t, b2a, b2b_s, b2b_t, b3
        sc.cbs.resize(specs.size());
        sc.input = h;
        const ParamGroup& g = params.group(st.group);

        Tensor y0 = convbn_forward(g, specs[0], h, &sc.cbs[0]);
        Tensor y1 = convbn_forward(g, specs[1], h, &sc.cbs[1]);
        y1 = convbn_forward(g, specs[2], y1, &sc.cbs[2]);
        y1 = convbn_forward(g, specs[3], y1, &sc.cbs[3]);
        Tensor y2 = convbn_forward(g, specs[4], h, &sc.cbs[4]);
        y2 = convbn_forward(g, specs[5], y2, &sc.cbs[5]);
        y2 = convbn_forward(g, specs[6], y2, &sc.cbs[6]);
        MaxPool3dResult pooled = maxpool3d_forward(h, branch_pool);
        Tensor y3 = convbn_forward(g, specs[7], pooled.y, &sc.cbs[7]);
        sc.pool = std::move(pooled);

        sc.branch_channels = {y0.dim(1), y1.dim(1), y2.dim(1), y3.dim(1)};
        h = concat_channels({y0, y1, y2, y3});
        break;
      }
    }
  }
  c.pooled_in = h;
  return global_avg_pool3d(h);
}

void S3dEncoder::backward(const ModelParams& params, const Cache& cache, const Tensor& dfeatures,
                          ModelParams* grads) const {
  Tensor dh = global_avg_pool3d_backward(cache.pooled_in, dfeatures);

  for (std::size_t si = stages_.size(); si-- > 0;) {
    const Stage& st = stages_[si];
    const StageCache& sc = cache.stages[si];
    switch (st.kind) {
      case Stage::kMaxPool: {
        dh = maxpool3d_backward(sc.input, sc.pool, dh);
        break;
      }
      case Stage::kConvBn:
      case Stage::kSepConv: {
        const auto specs = st.conv_specs();
        const ParamGroup& g = params.group(st.group);
        for (std::size_t k = specs.size(); k-- > 0;) {
          dh = convbn_backward(g, st.group, specs[k], sc.cbs[k], dh, grads);
        }
        break;
      }
      case Stage::kInception: {
        const auto specs = st.conv_specs();
        const ParamGroup& g = params.group(st.group);
        std::vector<Tensor> dy = split_channels(dh, sc.branch_channels);

        Tensor dx0 = convbn_backward(g, st.group, specs[0], sc.cbs[0], dy[0], grads);

        Tensor d1 = convbn_backward(g, st.group, specs[3], sc.cbs[3], dy[1], grads);
        d1 = convbn_backward(g, st.group, specs[2], sc.cbs[2], d1, grads);
        d1 = convbn_backward(g, st.group, specs[1], sc.cbs[1], d1, grads);

        Tensor d2 = convbn_backward(g, st.group, specs[6], sc.cbs[6], dy[2], grads);
        d2 = convbn_backward(g, st.group, specs[5], sc.cbs[5], d2, grads);
        d2 = convbn_backward(g, st.group, specs[4], sc.cbs[4], d2, grads);

        Tensor d3 = convbn_backward(g, st.group, specs[7], sc.cbs[7], dy[3], grads);
        d3 = maxpool3d_backward(sc.input, sc.pool, d3);

        Tensor dx = std::move(dx0);
        for (std::int64_t i = 0; i < dx.numel(); ++i) dx[i] += d1[i] + d2[i] + d3[i];
        dh = std::move(dx);
        break;
      }
    }
  }
}

}  // namespace mmhar
