#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "mmhar/tensor.hpp"

namespace mmhar {

/// One entry of a named-array archive: either a numeric tensor (stored as
/// float64 .npy) or a raw byte array (|u1 .npy), used for JSON headers.
struct NamedArray {
  std::vector<std::int64_t> shape;
  std::vector<double> numbers;
  std::vector<std::uint8_t> bytes;
  bool is_bytes = false;

  Tensor tensor() const { return Tensor(shape, numbers); }
  std::string text() const { return std::string(bytes.begin(), bytes.end()); }
};

/// Reads .npz archives (zip of .npy members, stored or deflated).
/// Numeric dtypes <f8, <f4, <i8, <i4, <i2 are widened to double; u1 entries
/// are exposed as bytes.
class NpzArchive {
 public:
  static NpzArchive load(const std::string& path);

  bool contains(const std::string& name) const { return arrays_.count(name) > 0; }
  const NamedArray& at(const std::string& name) const;
  const std::map<std::string, NamedArray>& arrays() const { return arrays_; }
  std::vector<std::string> names() const;

 private:
  std::map<std::string, NamedArray> arrays_;
};

/// Writes .npz archives with stored (uncompressed) members, readable by
/// numpy.load. Entry order follows add() order.
class NpzWriter {
 public:
  void add(const std::string& name, const Tensor& tensor);
  void add_bytes(const std::string& name, const std::string& text);
  void save(const std::string& path) const;

 private:
  struct Entry {
    std::string name;
    std::vector<std::int64_t> shape;
    std::vector<double> numbers;
    std::vector<std::uint8_t> bytes;
    bool is_bytes = false;
  };
  std::vector<Entry> entries_;
};

}  // namespace mmhar
