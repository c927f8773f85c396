#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace activelab {

/// Error taxonomy shared by every module. The CLI prints `name()` and exits 1.
enum class ErrorKind {
  DegenerateDistribution,
  UnknownLabel,
  InvalidPrecision,
  ShapeError,
  HorizonExceeded,
  PolicySpaceTooLarge,
  InvalidConfig,
  EmptyPolicySpace,
  UndefinedRate,
  DuplicatePolicy,
  NotEnrolled,
  OracleInfeasible,
  IoError,
  InvalidVisualization,
};

constexpr std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::DegenerateDistribution: return "DegenerateDistribution";
    case ErrorKind::UnknownLabel: return "UnknownLabel";
    case ErrorKind::InvalidPrecision: return "InvalidPrecision";
    case ErrorKind::ShapeError: return "ShapeError";
    case ErrorKind::HorizonExceeded: return "HorizonExceeded";
    case ErrorKind::PolicySpaceTooLarge: return "PolicySpaceTooLarge";
    case ErrorKind::InvalidConfig: return "InvalidConfig";
    case ErrorKind::EmptyPolicySpace: return "EmptyPolicySpace";
    case ErrorKind::UndefinedRate: return "UndefinedRate";
    case ErrorKind::DuplicatePolicy: return "DuplicatePolicy";
    case ErrorKind::NotEnrolled: return "NotEnrolled";
    case ErrorKind::OracleInfeasible: return "OracleInfeasible";
    case ErrorKind::IoError: return "IoError";
    case ErrorKind::InvalidVisualization: return "InvalidVisualization";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }
  std::string_view name() const noexcept { return to_string(kind_); }

 private:
  ErrorKind kind_;
};

}  // namespace activelab
