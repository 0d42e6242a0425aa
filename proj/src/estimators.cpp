#include "hcl/estimators.hpp"

#include <algorithm>
#include <vector>

#include <fmt/format.h>

#include "hcl/errors.hpp"

namespace hcl {

double estimate_pi(const HistoricalData& hcd) {
  const double total = hcd.total_units();
  if (!(total > 0.0)) raise(ErrorKind::EmptyData, "sum of n_h must be positive");
  if (hcd.total_events() == 0.0)
    raise(ErrorKind::DegenerateAllZero, "all historical studies have zero events");
  if (hcd.total_events() == total)
    raise(ErrorKind::DegenerateAllOne, "all historical studies have only events");
  return hcd.total_events() / total;
}

double pearson_dispersion(const HistoricalData& hcd, double pi_hat) {
  const auto H = hcd.size();
  if (H < 2) raise(ErrorKind::TooFewStudies, "dispersion needs at least 2 studies");
  const double v = pi_hat * (1.0 - pi_hat);
  double chi2 = 0.0;
  for (const auto& s : hcd.studies()) {
    const double r = s.y - s.n * pi_hat;
    chi2 += r * r / (s.n * v);
  }
  return chi2 / static_cast<double>(H - 1);
}

double anova_icc(const HistoricalData& hcd, double pi_hat) {
  const auto H = hcd.size();
  if (H < 2) raise(ErrorKind::TooFewStudies, "intra-class correlation needs at least 2 studies");
  const double df_between = static_cast<double>(H - 1);
  double between = 0.0;
  double within = 0.0;
  double df_within = 0.0;
  double sum_n2 = 0.0;
  for (const auto& s : hcd.studies()) {
    const double p = s.y / s.n;
    between += s.n * (p - pi_hat) * (p - pi_hat);
    within += s.n * p * (1.0 - p);
    df_within += s.n - 1.0;
    sum_n2 += s.n * s.n;
  }
  const double total = hcd.total_units();
  const double bms = between / df_between;
  // Clusters of size one contribute no within-cluster information.
  const double wms = df_within > 0.0 ? within / df_within : 0.0;
  const double n_a = (total - sum_n2 / total) / df_between;
  const double denom = bms + (n_a - 1.0) * wms;
  if (!(denom > 0.0)) return 0.0;
  return (bms - wms) / denom;
}

HistoricalData apply_zero_adjustment(const HistoricalData& hcd) {
  const bool zero = hcd.all_zero();
  const bool full = hcd.all_full();
  if (!zero && !full)
    raise(ErrorKind::NotDegenerate, "zero adjustment needs all-zero or all-success data");
  std::vector<Study> studies(hcd.studies().begin(), hcd.studies().end());
  auto& first = studies.front();
  if (first.n <= 0.5)
    raise(ErrorKind::InvalidParameter, "first study too small for the zero adjustment");
  first.n -= 0.5;
  // All-success data mirrors the rule on the failure counts.
  first.y = zero ? 0.5 : first.n - 0.5;
  return HistoricalData::from_studies(std::move(studies));
}

PreparedData prepare_for_estimation(const HistoricalData& hcd, ZeroPolicy policy) {
  const bool degenerate = hcd.all_zero() || hcd.all_full();
  if (degenerate && policy == ZeroPolicy::AdjustIfDegenerate)
    return {apply_zero_adjustment(hcd), true};
  if (hcd.all_zero())
    raise(ErrorKind::DegenerateAllZero, "all historical studies have zero events");
  if (hcd.all_full())
    raise(ErrorKind::DegenerateAllOne, "all historical studies have only events");
  return {hcd, false};
}

namespace {

double checked_pi(const HistoricalData& data) {
  const double pi = data.total_events() / data.total_units();
  if (!(pi > 0.0 && pi < 1.0))
    raise(ErrorKind::DegenerateProportion, fmt::format("pooled proportion {} not in (0, 1)", pi));
  return pi;
}

}  // namespace

ParameterEstimates estimate_quasibinomial(const HistoricalData& hcd, ZeroPolicy policy) {
  if (hcd.size() < 2) raise(ErrorKind::TooFewStudies, "quasi-binomial fit needs H >= 2");
  const auto prepared = prepare_for_estimation(hcd, policy);
  ParameterEstimates est;
  est.family = ModelFamily::QuasiBinomial;
  est.pi_hat = checked_pi(prepared.data);
  est.raw_dispersion = pearson_dispersion(prepared.data, est.pi_hat);
  est.clamped_phi = est.raw_dispersion < kMinPhi;
  est.phi_hat = std::max(est.raw_dispersion, kMinPhi);
  est.zero_adjusted = prepared.adjusted;
  return est;
}

ParameterEstimates estimate_betabinomial(const HistoricalData& hcd, ZeroPolicy policy) {
  if (hcd.size() < 2) raise(ErrorKind::TooFewStudies, "beta-binomial fit needs H >= 2");
  const auto prepared = prepare_for_estimation(hcd, policy);
  ParameterEstimates est;
  est.family = ModelFamily::BetaBinomial;
  est.pi_hat = checked_pi(prepared.data);
  est.raw_dispersion = anova_icc(prepared.data, est.pi_hat);
  est.clamped_rho = est.raw_dispersion < kMinRho;
  est.rho_hat = std::max(est.raw_dispersion, kMinRho);
  est.zero_adjusted = prepared.adjusted;
  return est;
}

ParameterEstimates estimate(ModelFamily family, const HistoricalData& hcd, ZeroPolicy policy) {
  return family == ModelFamily::QuasiBinomial ? estimate_quasibinomial(hcd, policy)
                                              : estimate_betabinomial(hcd, policy);
}

}  // namespace hcl
