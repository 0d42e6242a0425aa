#pragma once

#include "hcl/data_model.hpp"

namespace hcl {

inline constexpr double kMinPhi = 1.001;
inline constexpr double kMinRho = 0.00001;

enum class ZeroPolicy {
  /// Degenerate data (all y = 0 or all y = n) is an error.
  Never,
  /// Degenerate data is adjusted with apply_zero_adjustment first.
  AdjustIfDegenerate,
};

/// Pooled proportion sum(y) / sum(n).
/// Throws DegenerateAllZero / DegenerateAllOne at the boundary.
double estimate_pi(const HistoricalData& hcd);

/// Pearson dispersion of an intercept-only binomial GLM, unclamped.
double pearson_dispersion(const HistoricalData& hcd, double pi_hat);

/// ANOVA moment estimator of the intra-class correlation, unclamped.
double anova_icc(const HistoricalData& hcd, double pi_hat);

ParameterEstimates estimate_quasibinomial(const HistoricalData& hcd,
                                          ZeroPolicy policy = ZeroPolicy::AdjustIfDegenerate);
ParameterEstimates estimate_betabinomial(const HistoricalData& hcd,
                                         ZeroPolicy policy = ZeroPolicy::AdjustIfDegenerate);
ParameterEstimates estimate(ModelFamily family, const HistoricalData& hcd,
                            ZeroPolicy policy = ZeroPolicy::AdjustIfDegenerate);

/// All-zero data: first study becomes (0.5, n_1 - 0.5).
/// All-successes data (mirrored rule): first study becomes (n_1 - 1, n_1 - 0.5).
/// Throws NotDegenerate otherwise.
HistoricalData apply_zero_adjustment(const HistoricalData& hcd);

/// Returns the data unchanged or zero-adjusted, and whether it was adjusted.
struct PreparedData {
  HistoricalData data;
  bool adjusted = false;
};
PreparedData prepare_for_estimation(const HistoricalData& hcd, ZeroPolicy policy);

}  // namespace hcl
