#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gamecond {

enum class ErrorKind {
  EmptyMatrix,
  NonFiniteEntry,
  DimensionMismatch,
  InfeasibleProfile,
  EmptyVector,
  Infeasible,
  Unbounded,
  InfeasiblePolyhedron,
  NoPoints,
  PointIsEquilibrium,
  AllEquilibria,
  ParameterOutOfRange,
  IterationLimitExceeded,
  TooLarge,
  InvalidArgument,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::EmptyMatrix: return "EmptyMatrix";
    case ErrorKind::NonFiniteEntry: return "NonFiniteEntry";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::InfeasibleProfile: return "InfeasibleProfile";
    case ErrorKind::EmptyVector: return "EmptyVector";
    case ErrorKind::Infeasible: return "Infeasible";
    case ErrorKind::Unbounded: return "Unbounded";
    case ErrorKind::InfeasiblePolyhedron: return "InfeasiblePolyhedron";
    case ErrorKind::NoPoints: return "NoPoints";
    case ErrorKind::PointIsEquilibrium: return "PointIsEquilibrium";
    case ErrorKind::AllEquilibria: return "AllEquilibria";
    case ErrorKind::ParameterOutOfRange: return "ParameterOutOfRange";
    case ErrorKind::IterationLimitExceeded: return "IterationLimitExceeded";
    case ErrorKind::TooLarge: return "TooLarge";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the kinds above so
/// callers (and the CLI exit-code mapping) can dispatch without parsing text.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace gamecond
