#pragma once

#include <cstdint>
#include <cstring>
#include <string>
#include <vector>

namespace mmhar {

inline std::uint64_t fnv1a64(const void* bytes, std::size_t len, std::uint64_t h = 0xcbf29ce484222325ULL) {
  const auto* p = static_cast<const unsigned char*>(bytes);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::uint64_t fnv1a64(const std::string& s, std::uint64_t h = 0xcbf29ce484222325ULL) {
  return fnv1a64(s.data(), s.size(), h);
}

inline std::uint64_t fnv1a64(const std::vector<double>& v, std::uint64_t h = 0xcbf29ce484222325ULL) {
  return v.empty() ? h : fnv1a64(v.data(), v.size() * sizeof(double), h);
}

std::string hex64(std::uint64_t value);

}  // namespace mmhar
