#pragma once

#include <stdexcept>
#include <string>

namespace superx {

/// Invalid arguments or violated preconditions.
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A requested discretization exceeds the configured size limits.
class SizingError : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// Factorization failure, non-finite draws and similar numerical breakdowns.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent run configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace superx
