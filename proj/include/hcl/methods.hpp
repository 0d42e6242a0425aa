#pragma once

#include "hcl/bayesian.hpp"
#include "hcl/data_model.hpp"
#include "hcl/estimators.hpp"
#include "hcl/prediction_intervals.hpp"

namespace hcl {

struct MethodOptions {
  /// Multiplier for the np-chart and mean +/- k SD.
  double k = 2.0;
  CalibrationOptions calibration{};
  McmcConfig mcmc{};
  /// Degenerate data handling for methods that estimate a proportion.
  ZeroPolicy zero_policy = ZeroPolicy::AdjustIfDegenerate;
};

/// Runs one method on one data set. Errors propagate as hcl::Error.
IntervalResult compute_interval(Method method, const HistoricalData& hcd,
                                const FutureDesign& design, const MethodOptions& options);

}  // namespace hcl
