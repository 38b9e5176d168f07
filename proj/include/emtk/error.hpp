#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace emtk {

enum class ErrorKind { Config, Data, Numeric };

/// Base of every error raised by the library. The kind drives the CLI exit
/// code (config 2, data 3, numeric 4).
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorKind::Config, what) {}
};

class DataError : public Error {
 public:
  explicit DataError(const std::string& what) : Error(ErrorKind::Data, what) {}
};

/// Argument outside the documented domain (negative age, empty pool, ...).
class DomainError : public DataError {
 public:
  using DataError::DataError;
};

/// Statistic undefined for the input (n too small, constant vector).
class DegenerateInput : public DataError {
 public:
  using DataError::DataError;
};

/// Malformed binary file; carries the byte offset where parsing failed.
class FormatError : public DataError {
 public:
  FormatError(const std::string& what, std::size_t offset)
      : DataError(what + " (at byte offset " + std::to_string(offset) + ")"), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

class ShapeError : public Error {
 public:
  explicit ShapeError(const std::string& what) : Error(ErrorKind::Data, what) {}
};

/// A NaN or Inf appeared in a tensor.
class NumericFault : public Error {
 public:
  explicit NumericFault(const std::string& what) : Error(ErrorKind::Numeric, what) {}
};

}  // namespace emtk
