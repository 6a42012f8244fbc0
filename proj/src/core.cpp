#include <cmath>
#include <cstdio>

#include "mmhar/hashing.hpp"
#include "mmhar/rng.hpp"
#include "mmhar/tensor.hpp"

namespace mmhar {

bool Tensor::all_finite() const {
  for (double v : data_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

std::string Tensor::shape_string(const std::vector<std::int64_t>& shape) {
  std::string s = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += ", ";
    s += std::to_string(shape[i]);
  }
  return s + "]";
}

std::string hex64(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(value));
  return std::string(buf);
}

std::uint64_t derive_seed(std::uint64_t base, const std::string& tag) {
  return mix_seed(base, fnv1a64(tag));
}

std::vector<int> Rng::sample_without_replacement(int n, int k) {
  std::vector<int> pool(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) pool[static_cast<std::size_t>(i)] = i;
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(k));
  for (int i = 0; i < k && !pool.empty(); ++i) {
    const auto j = static_cast<std::size_t>(below(pool.size()));
    out.push_back(pool[j]);
    pool[j] = pool.back();
    pool.pop_back();
  }
  return out;
}

}  // namespace mmhar
