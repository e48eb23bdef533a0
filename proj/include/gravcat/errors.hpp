#pragma once

#include <stdexcept>
#include <string>

namespace gravcat {

enum class ErrorCode {
  InvalidCoordinate,
  EmptyPopulation,
  InvalidDuration,
  InsufficientData,
  InsufficientVariation,
  ThresholdExceedsPrune,
  UnknownKind,
  ModeMismatch,
  DimensionMismatch,
  InvalidSpeed,
  MissingGeometry,
  KeyMismatch,
  MissingIndex,
  InvalidConfig,
  // file/schema errors carry a line number
  MissingHeader,
  BadFieldCount,
  UnparsableNumber,
  NegativeCount,
  DuplicateZone,
  UnknownZone,
  IoFailure,
};

const char* error_code_name(ErrorCode code);

/// Every failure in the library is reported as an Error. Schema errors
/// additionally carry the source file and 1-based physical line number.
class Error : public std::runtime_error {
public:
  Error(ErrorCode code, std::string message)
      : std::runtime_error(format(code, message, {}, 0)),
        code_(code), line_(0) {}

  Error(ErrorCode code, std::string message, std::string file, std::size_t line)
      : std::runtime_error(format(code, message, file, line)),
        code_(code), file_(std::move(file)), line_(line) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& file() const noexcept { return file_; }
  std::size_t line() const noexcept { return line_; }   // 0 when not file-bound

  /// True for errors produced while reading an input file (CLI exit 3);
  /// everything else is a computation error (CLI exit 4).
  bool is_parse_error() const noexcept;

private:
  static std::string format(ErrorCode code, const std::string& message,
                            const std::string& file, std::size_t line);

  ErrorCode code_;
  std::string file_;
  std::size_t line_;
};

}  // namespace gravcat
