#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace xrai {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Matrix or vector shapes that do not line up.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A caller broke an API contract (e.g. a stale forward cache).
class ContractError : public Error {
 public:
  using Error::Error;
};

/// Invalid configuration value or combination of values.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A function term that cannot be placed in the requested encoding.
class EncodingError : public Error {
 public:
  using Error::Error;
};

/// Training produced a non-finite loss or gradient.
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, double last_finite_loss)
      : Error(what), last_finite_loss_(last_finite_loss) {}
  double last_finite_loss() const noexcept { return last_finite_loss_; }

 private:
  double last_finite_loss_;
};

/// Malformed or corrupted archive content. `line()` is 1-based, 0 if unknown.
class FormatError : public Error {
 public:
  FormatError(const std::string& what, std::size_t line = 0)
      : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Archive was written under a different configuration digest.
class DigestMismatchError : public Error {
 public:
  using Error::Error;
};

}  // namespace xrai
