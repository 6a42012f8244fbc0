#pragma once

#include <stdexcept>
#include <string>

namespace mmhar {

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Invalid configuration or config file (CLI exit code 1).
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& msg) : Error(msg) {}
};

/// Tensor/layer shape mismatch.
class ShapeError : public Error {
 public:
  explicit ShapeError(const std::string& msg) : Error(msg) {}
};

/// Dataset or checkpoint loading failure.
class LoadError : public Error {
 public:
  explicit LoadError(const std::string& msg) : Error(msg) {}
};

/// Violated call contract (e.g. gradients supplied for a frozen group).
class ContractError : public Error {
 public:
  explicit ContractError(const std::string& msg) : Error(msg) {}
};

/// Training failure (divergence, empty eligible set, ...).
class TrainError : public Error {
 public:
  explicit TrainError(const std::string& msg) : Error(msg) {}
};

}  // namespace mmhar
