#include "hcl/heuristics.hpp"

#include <algorithm>
#include <cmath>

#include "hcl/errors.hpp"

namespace hcl {
namespace {

void require_constant_clusters(const HistoricalData& hcd, const char* method) {
  if (!hcd.constant_cluster_size())
    raise(ErrorKind::UnequalClusterSizes,
          std::string(method) +
              " needs equal cluster sizes: event counts from groups of different size are "
              "not comparable, so the limits have no sensible interpretation");
}

void require_positive_k(double k) {
  if (!(k >= 0.0) || !std::isfinite(k)) raise(ErrorKind::InvalidParameter, "k must be >= 0");
}

std::int64_t cluster_size(const HistoricalData& hcd) {
  return static_cast<std::int64_t>(std::ceil(hcd[0].n));
}

}  // namespace

IntervalResult historical_range(const HistoricalData& hcd) {
  require_constant_clusters(hcd, "the historical range");
  const auto [lo, hi] = std::minmax_element(
      hcd.studies().begin(), hcd.studies().end(),
      [](const Study& a, const Study& b) { return a.y < b.y; });
  return make_interval(Method::HistoricalRange, lo->y, hi->y, std::nullopt, cluster_size(hcd));
}

IntervalResult np_chart(const HistoricalData& hcd, std::int64_t n_star, double k) {
  require_positive_k(k);
  if (n_star < 1) raise(ErrorKind::InvalidParameter, "n* must be at least 1");
  const double pi_bar = hcd.total_events() / hcd.total_units();
  if (!(pi_bar > 0.0 && pi_bar < 1.0))
    raise(ErrorKind::DegenerateProportion, "np-chart needs a pooled proportion in (0, 1)");
  const double ns = static_cast<double>(n_star);
  const double center = ns * pi_bar;
  const double half = k * std::sqrt(ns * pi_bar * (1.0 - pi_bar));
  // Nominal level of a normal k-sigma band.
  const double alpha = std::erfc(k / std::sqrt(2.0));
  return make_interval(Method::NpChart, center - half, center + half, alpha, n_star);
}

IntervalResult mean_k_sd(const HistoricalData& hcd, double k) {
  require_positive_k(k);
  if (hcd.size() < 2) raise(ErrorKind::TooFewStudies, "mean +/- k SD needs H >= 2");
  require_constant_clusters(hcd, "mean +/- k SD");
  const double H = static_cast<double>(hcd.size());
  const double mean = hcd.total_events() / H;
  double ss = 0.0;
  for (const auto& s : hcd.studies()) ss += (mean - s.y) * (mean - s.y);
  const double half = k * std::sqrt(ss / (H - 1.0));
  return make_interval(Method::MeanKSd, mean - half, mean + half, std::erfc(k / std::sqrt(2.0)),
                       cluster_size(hcd));
}

}  // namespace hcl
