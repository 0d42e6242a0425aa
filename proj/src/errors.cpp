#include "hcl/errors.hpp"

namespace hcl {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::EmptyData: return "EmptyData";
    case ErrorKind::NegativeCount: return "NegativeCount";
    case ErrorKind::SuccessExceedsTotal: return "SuccessExceedsTotal";
    case ErrorKind::EmptyCluster: return "EmptyCluster";
    case ErrorKind::MalformedInput: return "MalformedInput";
    case ErrorKind::TooFewStudies: return "TooFewStudies";
    case ErrorKind::DegenerateAllZero: return "DegenerateAllZero";
    case ErrorKind::DegenerateAllOne: return "DegenerateAllOne";
    case ErrorKind::DegenerateProportion: return "DegenerateProportion";
    case ErrorKind::NotDegenerate: return "NotDegenerate";
    case ErrorKind::UnequalClusterSizes: return "UnequalClusterSizes";
    case ErrorKind::InvalidParameter: return "InvalidParameter";
    case ErrorKind::CalibrationNotConverged: return "CalibrationNotConverged";
    case ErrorKind::BootstrapDegenerate: return "BootstrapDegenerate";
    case ErrorKind::NonConvergence: return "NonConvergence";
    case ErrorKind::EmptyDraws: return "EmptyDraws";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

void raise(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace hcl
