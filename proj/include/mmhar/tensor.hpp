#pragma once

#include <cstdint>
#include <initializer_list>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace mmhar {

/// Dense row-major tensor of doubles. Small, copyable, no views.
class Tensor {
 public:
  Tensor() = default;

  explicit Tensor(std::vector<std::int64_t> shape)
      : shape_(std::move(shape)), data_(checked_numel(shape_), 0.0) {}

  Tensor(std::vector<std::int64_t> shape, std::vector<double> data)
      : shape_(std::move(shape)), data_(std::move(data)) {
    if (static_cast<std::int64_t>(data_.size()) != checked_numel(shape_)) {
      throw std::invalid_argument("Tensor: data size does not match shape");
    }
  }

  static Tensor zeros(std::vector<std::int64_t> shape) { return Tensor(std::move(shape)); }

  static Tensor full(std::vector<std::int64_t> shape, double value) {
    Tensor t(std::move(shape));
    std::fill(t.data_.begin(), t.data_.end(), value);
    return t;
  }

  const std::vector<std::int64_t>& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }

  std::int64_t dim(std::size_t i) const {
    if (i >= shape_.size()) throw std::out_of_range("Tensor::dim index out of range");
    return shape_[i];
  }

  std::int64_t numel() const { return static_cast<std::int64_t>(data_.size()); }
  bool empty() const { return data_.empty(); }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  std::vector<double>& values() { return data_; }
  const std::vector<double>& values() const { return data_; }

  double& operator[](std::int64_t i) { return data_[static_cast<std::size_t>(i)]; }
  double operator[](std::int64_t i) const { return data_[static_cast<std::size_t>(i)]; }

  template <typename... Ix>
  double& at(Ix... ix) {
    return data_[static_cast<std::size_t>(offset(ix...))];
  }
  template <typename... Ix>
  double at(Ix... ix) const {
    return data_[static_cast<std::size_t>(offset(ix...))];
  }

  bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }

  bool all_finite() const;

  void fill(double v) { std::fill(data_.begin(), data_.end(), v); }

  /// Reinterpret with a new shape of identical element count.
  Tensor reshaped(std::vector<std::int64_t> shape) const {
    if (checked_numel(shape) != numel()) {
      throw std::invalid_argument("Tensor::reshaped: element count mismatch");
    }
    return Tensor(std::move(shape), data_);
  }

  static std::string shape_string(const std::vector<std::int64_t>& shape);
  std::string shape_string() const { return shape_string(shape_); }

 private:
  template <typename... Ix>
  std::int64_t offset(Ix... ix) const {
    static_assert(sizeof...(Ix) >= 1);
    const std::int64_t idx[] = {static_cast<std::int64_t>(ix)...};
    std::int64_t off = 0;
    for (std::size_t d = 0; d < sizeof...(Ix); ++d) off = off * shape_[d] + idx[d];
    return off;
  }

  static std::int64_t checked_numel(const std::vector<std::int64_t>& shape) {
    std::int64_t n = 1;
    for (std::int64_t d : shape) {
      if (d < 0) throw std::invalid_argument("Tensor: negative dimension");
      n *= d;
    }
    return n;
  }

  std::vector<std::int64_t> shape_;
  std::vector<double> data_;
};

}  // namespace mmhar
