#pragma once

#include <cstdint>
#include <span>

#include "hcl/bisection.hpp"
#include "hcl/bootstrap_kernels.hpp"
#include "hcl/data_model.hpp"
#include "hcl/rng.hpp"

namespace hcl {

/// sqrt(var(n* pi_hat) + var(Y*)) under the quasi-binomial model:
/// phi n*^2 pi (1 - pi) / sum(n) + phi n* pi (1 - pi).
double qb_prediction_se(double pi, double phi, std::int64_t n_star, double total_n);

/// Same under the beta-binomial model:
/// [n*^2 pi (1 - pi) / N + (N - 1) / N n*^2 pi (1 - pi) rho] + n* pi (1 - pi) [1 + (n* - 1) rho].
double bb_prediction_se(double pi, double rho, std::int64_t n_star, double total_n);

/// Dispatches on `family`; `dispersion` is phi or rho respectively.
double prediction_se(ModelFamily family, double pi, double dispersion, std::int64_t n_star,
                     double total_n);

/// Standard normal quantile.
double normal_quantile(double p);

IntervalResult qb_pi_uncalibrated(const ParameterEstimates& est, const FutureDesign& design,
                                  double total_n);
IntervalResult bb_pi_uncalibrated(const ParameterEstimates& est, const FutureDesign& design,
                                  double total_n);

struct CalibrationOptions {
  std::size_t B = 10000;
  double tolerance = 0.001;
  std::uint64_t seed = 1;
  Execution execution = Execution::Parallel;
  bool clamp_bootstrap_phi = false;
  BisectionSettings bisection{};
};

/// Bisects both tail coefficients on one set of bootstrap draws.
/// Throws CalibrationNotConverged if either tail misses its band.
CalibrationReport calibrate_from_bootstrap(const BootstrapSample& bs, double alpha,
                                           double tolerance, const BisectionSettings& settings = {},
                                           Execution exec = Execution::Parallel);

/// Draws B bootstrap HCDs and future counts from the fitted process and
/// calibrates the lower and upper coefficients. Requires B >= 1000 and
/// 0 < tolerance < alpha / 2.
CalibrationReport calibrate_tails(const ParameterEstimates& est, const FutureDesign& design,
                                  std::span<const std::int64_t> cluster_design,
                                  const CalibrationOptions& options);

IntervalResult qb_pi_calibrated(const HistoricalData& hcd, const FutureDesign& design,
                                const CalibrationOptions& options);
IntervalResult bb_pi_calibrated(const HistoricalData& hcd, const FutureDesign& design,
                                const CalibrationOptions& options);

}  // namespace hcl
