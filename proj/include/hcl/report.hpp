#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hcl/bayesian.hpp"
#include "hcl/data_model.hpp"

namespace hcl {

inline constexpr std::string_view kToolVersion = "1.0.0";
inline constexpr std::string_view kReportSchema = "hcl-report/1";

struct RunInfo {
  std::string tool_version{kToolVersion};
  std::string input_path;
  std::string input_sha256;
  std::uint64_t seed = 0;
  /// Every effective flag value, defaults included.
  std::map<std::string, std::string> flags;
};

struct MethodReport {
  Method method = Method::HistoricalRange;
  std::optional<IntervalResult> interval;
  std::optional<ParameterEstimates> estimates;
  std::vector<ParameterSummary> mcmc;
  std::optional<ErrorKind> error;
  std::string error_message;
};

struct ComputeReport {
  RunInfo run;
  std::size_t studies = 0;
  double total_events = 0.0;
  double total_units = 0.0;
  std::int64_t n_star = 0;
  double alpha = 0.05;
  std::vector<MethodReport> methods;
};

/// Versioned JSON document; contains no timestamps so identical runs give
/// byte-identical output.
std::string to_json(const ComputeReport& report);

/// Table with columns Method / Lower CL / Upper CL / Interval width, each
/// limit followed by the covered integer in brackets.
void write_table(std::ostream& out, const ComputeReport& report);

/// Hex SHA-256 of a byte string.
std::string sha256_hex(std::string_view bytes);

}  // namespace hcl
