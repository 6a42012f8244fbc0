#include "mmhar/params.hpp"

#include "mmhar/hashing.hpp"

namespace mmhar {

ModelParams make_grad_store(const ModelParams& params) {
  ModelParams grads;
  for (const auto& gname : params.group_order) {
    const ParamGroup& g = params.group(gname);
    if (!g.trainable) continue;
    ParamGroup& out = grads.add_group(gname);
    for (const auto& pname : g.order) {
      if (is_buffer_name(pname)) continue;
      out.add(pname, Tensor::zeros(g.at(pname).shape()));
    }
  }
  return grads;
}

Tensor* grad_ptr(ModelParams& grads, const std::string& group, const std::string& name) {
  auto git = grads.groups.find(group);
  if (git == grads.groups.end()) return nullptr;
  auto ait = git->second.arrays.find(name);
  if (ait == git->second.arrays.end()) return nullptr;
  return &ait->second;
}

std::uint64_t hash_group(const ParamGroup& group) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& name : group.order) {
    h = fnv1a64(name, h);
    const Tensor& t = group.at(name);
    for (std::int64_t d : t.shape()) h = fnv1a64(&d, sizeof(d), h);
    h = fnv1a64(t.values(), h);
  }
  return h;
}

std::uint64_t hash_params(const ModelParams& params) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& gname : params.group_order) {
    h = fnv1a64(gname, h);
    const std::uint64_t gh = hash_group(params.group(gname));
    h = fnv1a64(&gh, sizeof(gh), h);
  }
  return h;
}

bool params_equal(const ModelParams& a, const ModelParams& b) {
  if (a.group_order != b.group_order) return false;
  for (const auto& gname : a.group_order) {
    const ParamGroup& ga = a.group(gname);
    const ParamGroup& gb = b.group(gname);
    if (ga.order != gb.order || ga.trainable != gb.trainable) return false;
    for (const auto& pname : ga.order) {
      const Tensor& ta = ga.at(pname);
      const Tensor& tb = gb.at(pname);
      if (ta.shape() != tb.shape() || ta.values() != tb.values()) return false;
    }
  }
  return true;
}

}  // namespace mmhar
