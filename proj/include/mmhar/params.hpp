#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "mmhar/errors.hpp"
#include "mmhar/tensor.hpp"

namespace mmhar {

/// Named parameter group with a trainability flag. Arrays whose name ends in
/// "running_mean"/"running_var" are buffers: saved and loaded with the group
/// but never given gradients.
struct ParamGroup {
  std::vector<std::string> order;
  std::map<std::string, Tensor> arrays;
  bool trainable = true;

  Tensor& add(const std::string& name, Tensor value) {
    auto [it, inserted] = arrays.emplace(name, std::move(value));
    if (!inserted) throw Error("ParamGroup: duplicate array '" + name + "'");
    order.push_back(name);
    return it->second;
  }

  bool contains(const std::string& name) const { return arrays.count(name) > 0; }

  Tensor& at(const std::string& name) {
    auto it = arrays.find(name);
    if (it == arrays.end()) throw Error("ParamGroup: missing array '" + name + "'");
    return it->second;
  }
  const Tensor& at(const std::string& name) const {
    auto it = arrays.find(name);
    if (it == arrays.end()) throw Error("ParamGroup: missing array '" + name + "'");
    return it->second;
  }
};

struct ModelParams {
  std::vector<std::string> group_order;
  std::map<std::string, ParamGroup> groups;

  ParamGroup& add_group(const std::string& name) {
    auto [it, inserted] = groups.emplace(name, ParamGroup{});
    if (!inserted) throw Error("ModelParams: duplicate group '" + name + "'");
    group_order.push_back(name);
    return it->second;
  }

  bool has_group(const std::string& name) const { return groups.count(name) > 0; }

  ParamGroup& group(const std::string& name) {
    auto it = groups.find(name);
    if (it == groups.end()) throw Error("ModelParams: missing group '" + name + "'");
    return it->second;
  }
  const ParamGroup& group(const std::string& name) const {
    auto it = groups.find(name);
    if (it == groups.end()) throw Error("ModelParams: missing group '" + name + "'");
    return it->second;
  }

  Tensor& param(const std::string& g, const std::string& n) { return group(g).at(n); }
  const Tensor& param(const std::string& g, const std::string& n) const { return group(g).at(n); }
};

inline bool is_buffer_name(const std::string& name) {
  auto ends_with = [&](const std::string& suffix) {
    return name.size() >= suffix.size() &&
           name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0;
  };
  return ends_with("running_mean") || ends_with("running_var");
}

/// Zero-filled gradient accumulator covering the trainable, non-buffer
/// arrays of `params`.
ModelParams make_grad_store(const ModelParams& params);

/// Pointer to the gradient tensor for (group, name), or nullptr when the
/// group is absent (frozen) so callers can skip the work.
Tensor* grad_ptr(ModelParams& grads, const std::string& group, const std::string& name);

/// Order- and content-sensitive hash of a group's arrays (bit patterns).
std::uint64_t hash_group(const ParamGroup& group);
std::uint64_t hash_params(const ModelParams& params);

/// Deep equality on shapes and bit patterns.
bool params_equal(const ModelParams& a, const ModelParams& b);

}  // namespace mmhar
