#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hcl {

/// One historical control group: y events out of n experimental units.
/// Counts are stored as reals because the all-zero adjustment produces
/// half-integers; user input is always integral.
struct Study {
  std::string id;
  double y = 0.0;
  double n = 0.0;

  friend bool operator==(const Study&, const Study&) = default;
};

/// A raw (unvalidated) input row.
struct RawRow {
  std::string id;
  std::int64_t y = 0;
  std::int64_t n = 0;
};

/// Validated historical control data. Immutable once built.
class HistoricalData {
 public:
  /// Builds from real-valued counts; checks 0 <= y <= n, n > 0, non-empty.
  /// Integrality is not enforced here (see validate_hcd for user input).
  static HistoricalData from_studies(std::vector<Study> studies);
  static HistoricalData from_counts(std::span<const double> y, std::span<const double> n);

  std::span<const Study> studies() const noexcept { return studies_; }
  std::size_t size() const noexcept { return studies_.size(); }
  const Study& operator[](std::size_t i) const { return studies_[i]; }

  double total_events() const noexcept { return total_events_; }
  double total_units() const noexcept { return total_units_; }

  bool all_zero() const noexcept;
  bool all_full() const noexcept;
  bool constant_cluster_size() const noexcept;

  /// Integer cluster sizes for resampling; half-unit reductions from the
  /// zero adjustment are rounded back up.
  std::vector<std::int64_t> cluster_design() const;

  friend bool operator==(const HistoricalData& a, const HistoricalData& b) {
    return a.studies_ == b.studies_;
  }

 private:
  explicit HistoricalData(std::vector<Study> studies);

  std::vector<Study> studies_;
  double total_events_ = 0.0;
  double total_units_ = 0.0;
};

/// Validates user-supplied rows, preserving order.
/// Throws EmptyData, NegativeCount, SuccessExceedsTotal or EmptyCluster.
HistoricalData validate_hcd(std::span<const RawRow> rows);

struct FutureDesign {
  std::int64_t n_star = 0;
  double alpha = 0.05;

  FutureDesign(std::int64_t n_star, double alpha);
};

enum class ModelFamily { QuasiBinomial, BetaBinomial };

std::string_view to_string(ModelFamily family) noexcept;

struct ParameterEstimates {
  ModelFamily family = ModelFamily::QuasiBinomial;
  double pi_hat = 0.0;
  std::optional<double> phi_hat;
  std::optional<double> rho_hat;
  /// Estimate before the floor was applied (phi or rho, by family).
  double raw_dispersion = 0.0;
  bool clamped_phi = false;
  bool clamped_rho = false;
  bool zero_adjusted = false;
};

enum class Method {
  HistoricalRange,
  NpChart,
  MeanKSd,
  QbUncalibrated,
  BbUncalibrated,
  QbCalibrated,
  BbCalibrated,
  BayesHierarchical,
  BayesGlmm,
};

/// CLI/CSV tag: "hist-range", "np-chart", "mean-sd", "qb-uncal", "bb-uncal",
/// "qb-cal", "bb-cal", "bayes-hier", "bayes-glmm".
std::string_view to_string(Method method) noexcept;
std::optional<Method> method_from_string(std::string_view tag) noexcept;
/// Human label used in report tables.
std::string_view display_name(Method method) noexcept;

struct CalibrationReport {
  double q_lower = 0.0;
  double q_upper = 0.0;
  double achieved_psi_lower = 0.0;
  double achieved_psi_upper = 0.0;
  std::size_t bootstrap_B = 0;
  int iterations_lower = 0;
  int iterations_upper = 0;
  double tolerance = 0.0;
  /// Bootstrap replicates that had to be redrawn because re-estimation failed.
  std::size_t redrawn = 0;
};

/// Integers k with max(lower,0) <= k <= min(upper,n*). Empty when lo > hi.
struct CoveredRange {
  std::int64_t lo = 0;
  std::int64_t hi = -1;

  bool empty() const noexcept { return lo > hi; }
  bool contains(std::int64_t k) const noexcept { return lo <= k && k <= hi; }
  friend bool operator==(const CoveredRange&, const CoveredRange&) = default;
};

CoveredRange covered_range(double lower, double upper, std::int64_t n_star) noexcept;

struct IntervalResult {
  double lower = 0.0;
  double upper = 0.0;
  CoveredRange covered;
  Method method = Method::HistoricalRange;
  /// Absent for the historical range, which targets no nominal level.
  std::optional<double> alpha;
  std::int64_t n_star = 0;
  std::optional<CalibrationReport> calibration;
};

IntervalResult make_interval(Method method, double lower, double upper,
                             std::optional<double> alpha, std::int64_t n_star);

}  // namespace hcl
