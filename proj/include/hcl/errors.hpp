#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hcl {

enum class ErrorKind {
  EmptyData,
  NegativeCount,
  SuccessExceedsTotal,
  EmptyCluster,
  MalformedInput,
  TooFewStudies,
  DegenerateAllZero,
  DegenerateAllOne,
  DegenerateProportion,
  NotDegenerate,
  UnequalClusterSizes,
  InvalidParameter,
  CalibrationNotConverged,
  BootstrapDegenerate,
  NonConvergence,
  EmptyDraws,
  Io,
};

/// Stable machine-readable category name, e.g. "SuccessExceedsTotal".
std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void raise(ErrorKind kind, const std::string& message);

}  // namespace hcl
