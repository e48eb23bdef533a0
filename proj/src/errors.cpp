#include "gravcat/errors.hpp"

namespace gravcat {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidCoordinate:     return "InvalidCoordinate";
    case ErrorCode::EmptyPopulation:       return "EmptyPopulation";
    case ErrorCode::InvalidDuration:       return "InvalidDuration";
    case ErrorCode::InsufficientData:      return "InsufficientData";
    case ErrorCode::InsufficientVariation: return "InsufficientVariation";
    case ErrorCode::ThresholdExceedsPrune: return "ThresholdExceedsPrune";
    case ErrorCode::UnknownKind:           return "UnknownKind";
    case ErrorCode::ModeMismatch:          return "ModeMismatch";
    case ErrorCode::DimensionMismatch:     return "DimensionMismatch";
    case ErrorCode::InvalidSpeed:          return "InvalidSpeed";
    case ErrorCode::MissingGeometry:       return "MissingGeometry";
    case ErrorCode::KeyMismatch:           return "KeyMismatch";
    case ErrorCode::MissingIndex:          return "MissingIndex";
    case ErrorCode::InvalidConfig:         return "InvalidConfig";
    case ErrorCode::MissingHeader:         return "MissingHeader";
    case ErrorCode::BadFieldCount:         return "BadFieldCount";
    case ErrorCode::UnparsableNumber:      return "UnparsableNumber";
    case ErrorCode::NegativeCount:         return "NegativeCount";
    case ErrorCode::DuplicateZone:         return "DuplicateZone";
    case ErrorCode::UnknownZone:           return "UnknownZone";
    case ErrorCode::IoFailure:             return "IoFailure";
  }
  return "UnknownError";
}

bool Error::is_parse_error() const noexcept {
  switch (code_) {
    case ErrorCode::MissingHeader:
    case ErrorCode::BadFieldCount:
    case ErrorCode::UnparsableNumber:
    case ErrorCode::NegativeCount:
    case ErrorCode::DuplicateZone:
    case ErrorCode::UnknownZone:
    case ErrorCode::IoFailure:
      return true;
    default:
      // invariant violations found inside a file (bad coordinate, bad
      // duration, ...) count as parse errors when bound to a line
      return line_ != 0 || !file_.empty();
  }
}

std::string Error::format(ErrorCode code, const std::string& message,
                          const std::string& file, std::size_t line) {
  std::string out = error_code_name(code);
  out += ": ";
  if (!file.empty()) {
    out += file;
    out += ":";
    if (line != 0) {
      out += std::to_string(line);
      out += ":";
    }
    out += " ";
  }
  out += message;
  return out;
}

}  // namespace gravcat
