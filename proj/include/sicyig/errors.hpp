#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sicyig {

/// Base class of every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid input value or combination of inputs.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// Input outside the mathematical domain of an operation (e.g. a field point
/// inside the magnet, zero separation, zero gradient).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Malformed text input. Carries the 1-based line number when known.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line = 0)
      : Error(line ? what + " (line " + std::to_string(line) + ")" : what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Configuration key or value rejected by the schema.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A numerical procedure failed to converge or produced a non-finite value.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace sicyig
