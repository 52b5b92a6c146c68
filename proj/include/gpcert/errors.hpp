#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gpcert {

enum class ErrorKind {
  NonFinite,
  Overflow,
  SpectrumHit,
  EigSolveFailure,
  BracketFailure,
  NoHorizon,
  NotDecaying,
  QuadratureFailure,
  ParseError,
  NotSquare,
  UnsupportedField,
  UnknownName,
  BadParams,
  InvalidArgument,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NonFinite: return "NonFinite";
    case ErrorKind::Overflow: return "Overflow";
    case ErrorKind::SpectrumHit: return "SpectrumHit";
    case ErrorKind::EigSolveFailure: return "EigSolveFailure";
    case ErrorKind::BracketFailure: return "BracketFailure";
    case ErrorKind::NoHorizon: return "NoHorizon";
    case ErrorKind::NotDecaying: return "NotDecaying";
    case ErrorKind::QuadratureFailure: return "QuadratureFailure";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::NotSquare: return "NotSquare";
    case ErrorKind::UnsupportedField: return "UnsupportedField";
    case ErrorKind::UnknownName: return "UnknownName";
    case ErrorKind::BadParams: return "BadParams";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the kinds above.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Raised by the horizon search; records the largest norm met so callers can
/// tell a diverging semigroup from a merely slow one.
class NoHorizonError : public Error {
 public:
  NoHorizonError(const std::string& what, double max_norm, double last_time)
      : Error(ErrorKind::NoHorizon, what), max_norm_(max_norm), last_time_(last_time) {}

  double max_norm() const noexcept { return max_norm_; }
  double last_time() const noexcept { return last_time_; }

 private:
  double max_norm_;
  double last_time_;
};

/// Matrix Market parse failure with 1-based location.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column)
      : Error(ErrorKind::ParseError, "line " + std::to_string(line) + ", column " +
                                         std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

}  // namespace gpcert
