#include "hcl/data_model.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <utility>

#include <fmt/format.h>

#include "hcl/errors.hpp"

namespace hcl {

HistoricalData::HistoricalData(std::vector<Study> studies) : studies_(std::move(studies)) {
  for (const auto& s : studies_) {
    total_events_ += s.y;
    total_units_ += s.n;
  }
}

HistoricalData HistoricalData::from_studies(std::vector<Study> studies) {
  if (studies.empty()) raise(ErrorKind::EmptyData, "historical control data has no studies");
  for (std::size_t h = 0; h < studies.size(); ++h) {
    const auto& s = studies[h];
    if (!std::isfinite(s.y) || !std::isfinite(s.n))
      raise(ErrorKind::MalformedInput, fmt::format("study {}: non-finite count", h + 1));
    if (s.y < 0.0 || s.n < 0.0)
      raise(ErrorKind::NegativeCount, fmt::format("study {}: negative count", h + 1));
    if (s.n <= 0.0)
      raise(ErrorKind::EmptyCluster, fmt::format("study {}: n must be at least 1", h + 1));
    if (s.y > s.n)
      raise(ErrorKind::SuccessExceedsTotal,
            fmt::format("study {}: y = {} exceeds n = {}", h + 1, s.y, s.n));
  }
  return HistoricalData(std::move(studies));
}

HistoricalData HistoricalData::from_counts(std::span<const double> y, std::span<const double> n) {
  if (y.size() != n.size())
    raise(ErrorKind::MalformedInput, "event and total vectors differ in length");
  std::vector<Study> studies;
  studies.reserve(y.size());
  for (std::size_t h = 0; h < y.size(); ++h) studies.push_back({{}, y[h], n[h]});
  return from_studies(std::move(studies));
}

bool HistoricalData::all_zero() const noexcept {
  return std::all_of(studies_.begin(), studies_.end(), [](const Study& s) { return s.y == 0.0; });
}

bool HistoricalData::all_full() const noexcept {
  return std::all_of(studies_.begin(), studies_.end(), [](const Study& s) { return s.y == s.n; });
}

bool HistoricalData::constant_cluster_size() const noexcept {
  return std::all_of(studies_.begin(), studies_.end(),
                     [&](const Study& s) { return s.n == studies_.front().n; });
}

std::vector<std::int64_t> HistoricalData::cluster_design() const {
  std::vector<std::int64_t> design;
  design.reserve(studies_.size());
  for (const auto& s : studies_) design.push_back(static_cast<std::int64_t>(std::ceil(s.n)));
  return design;
}

HistoricalData validate_hcd(std::span<const RawRow> rows) {
  if (rows.empty()) raise(ErrorKind::EmptyData, "historical control data has no studies");
  std::vector<Study> studies;
  studies.reserve(rows.size());
  for (const auto& r : rows) {
    studies.push_back({r.id, static_cast<double>(r.y), static_cast<double>(r.n)});
  }
  return HistoricalData::from_studies(std::move(studies));
}

FutureDesign::FutureDesign(std::int64_t n_star_, double alpha_) : n_star(n_star_), alpha(alpha_) {
  if (n_star < 1) raise(ErrorKind::InvalidParameter, "n* must be at least 1");
  if (!(alpha > 0.0 && alpha < 1.0))
    raise(ErrorKind::InvalidParameter, fmt::format("alpha = {} outside (0, 1)", alpha));
}

std::string_view to_string(ModelFamily family) noexcept {
  return family == ModelFamily::QuasiBinomial ? "quasi-binomial" : "beta-binomial";
}

namespace {

struct MethodInfo {
  Method method;
  std::string_view tag;
  std::string_view label;
};

constexpr std::array kMethods{
    MethodInfo{Method::HistoricalRange, "hist-range", "Hist. range"},
    MethodInfo{Method::NpChart, "np-chart", "np-chart"},
    MethodInfo{Method::MeanKSd, "mean-sd", "Mean +/- k SD"},
    MethodInfo{Method::QbUncalibrated, "qb-uncal", "Quasi-binomial (uncalibrated)"},
    MethodInfo{Method::BbUncalibrated, "bb-uncal", "Beta-binomial (uncalibrated)"},
    MethodInfo{Method::QbCalibrated, "qb-cal", "Quasi-binomial"},
    MethodInfo{Method::BbCalibrated, "bb-cal", "Beta-binomial"},
    MethodInfo{Method::BayesHierarchical, "bayes-hier", "Bayesian hierarchical"},
    MethodInfo{Method::BayesGlmm, "bayes-glmm", "Bayesian GLMM"},
};

const MethodInfo& info(Method m) {
  return *std::find_if(kMethods.begin(), kMethods.end(),
                       [m](const MethodInfo& i) { return i.method == m; });
}

// Limits that are integral up to rounding noise are snapped so that
// ceil/floor do not step past them.
double snap(double x) {
  const double r = std::round(x);
  return std::abs(x - r) <= 1e-9 * std::max(1.0, std::abs(x)) ? r : x;
}

}  // namespace

std::string_view to_string(Method method) noexcept { return info(method).tag; }

std::string_view display_name(Method method) noexcept { return info(method).label; }

std::optional<Method> method_from_string(std::string_view tag) noexcept {
  for (const auto& i : kMethods)
    if (i.tag == tag) return i.method;
  return std::nullopt;
}

CoveredRange covered_range(double lower, double upper, std::int64_t n_star) noexcept {
  const double lo = std::ceil(snap(std::max(lower, 0.0)));
  const double hi = std::floor(snap(std::min(upper, static_cast<double>(n_star))));
  if (!(lo <= hi)) return CoveredRange{};
  return CoveredRange{static_cast<std::int64_t>(lo), static_cast<std::int64_t>(hi)};
}

IntervalResult make_interval(Method method, double lower, double upper,
                             std::optional<double> alpha, std::int64_t n_star) {
  if (!(lower <= upper))
    raise(ErrorKind::InvalidParameter,
          fmt::format("interval lower limit {} exceeds upper limit {}", lower, upper));
  IntervalResult r;
  r.lower = lower;
  r.upper = upper;
  r.covered = covered_range(lower, upper, n_star);
  r.method = method;
  r.alpha = alpha;
  r.n_star = n_star;
  return r;
}

}  // namespace hcl
