#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace fcm {

/// Failure categories shared by the library, the CLI (exit codes) and the
/// HTTP service (status codes).
enum class ErrorKind {
  input_range,
  degenerate_input,
  configuration,
  parse,
  shape,
  validation,
  consistency,
  hierarchy,
  invalid_pair,
  usage,
  pipeline,
  not_found,
  io,
  unconverged,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Malformed cell in a tabular input; row and column are 1-based file positions.
class ParseError : public Error {
 public:
  ParseError(std::size_t row, std::size_t column, const std::string& message);

  std::size_t row() const noexcept { return row_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t row_;
  std::size_t column_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace fcm
