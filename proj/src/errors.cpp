#include "fcm/errors.hpp"

namespace fcm {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::input_range: return "input-range";
    case ErrorKind::degenerate_input: return "degenerate-input";
    case ErrorKind::configuration: return "configuration";
    case ErrorKind::parse: return "parse";
    case ErrorKind::shape: return "shape";
    case ErrorKind::validation: return "validation";
    case ErrorKind::consistency: return "consistency";
    case ErrorKind::hierarchy: return "hierarchy";
    case ErrorKind::invalid_pair: return "invalid-pair";
    case ErrorKind::usage: return "usage";
    case ErrorKind::pipeline: return "pipeline";
    case ErrorKind::not_found: return "not-found";
    case ErrorKind::io: return "io";
    case ErrorKind::unconverged: return "unconverged";
  }
  return "unknown";
}

ParseError::ParseError(std::size_t row, std::size_t column, const std::string& message)
    : Error(ErrorKind::parse,
            "row " + std::to_string(row) + ", column " + std::to_string(column) + ": " + message),
      row_(row),
      column_(column) {}

}  // namespace fcm
