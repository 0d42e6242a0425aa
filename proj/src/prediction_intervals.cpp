#include "hcl/prediction_intervals.hpp"

#include <cmath>
#include <vector>

#include <boost/math/distributions/normal.hpp>
#include <fmt/format.h>

#include "hcl/errors.hpp"
#include "hcl/estimators.hpp"

namespace hcl {

double qb_prediction_se(double pi, double phi, std::int64_t n_star, double total_n) {
  const double ns = static_cast<double>(n_star);
  const double v = pi * (1.0 - pi);
  return std::sqrt(phi * ns * ns * v / total_n + phi * ns * v);
}

double bb_prediction_se(double pi, double rho, std::int64_t n_star, double total_n) {
  const double ns = static_cast<double>(n_star);
  const double v = pi * (1.0 - pi);
  const double var_center = ns * ns * v / total_n + (total_n - 1.0) / total_n * ns * ns * v * rho;
  const double var_future = ns * v * (1.0 + (ns - 1.0) * rho);
  return std::sqrt(var_center + var_future);
}

double prediction_se(ModelFamily family, double pi, double dispersion, std::int64_t n_star,
                     double total_n) {
  return family == ModelFamily::QuasiBinomial ? qb_prediction_se(pi, dispersion, n_star, total_n)
                                              : bb_prediction_se(pi, dispersion, n_star, total_n);
}

double normal_quantile(double p) {
  return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

namespace {

void require_estimates(const ParameterEstimates& est, ModelFamily family) {
  if (est.family != family)
    raise(ErrorKind::InvalidParameter,
          fmt::format("expected {} estimates, got {}", to_string(family), to_string(est.family)));
  if (!(est.pi_hat > 0.0 && est.pi_hat < 1.0))
    raise(ErrorKind::DegenerateProportion, "prediction interval needs pi_hat in (0, 1)");
  if (family == ModelFamily::QuasiBinomial && !(est.phi_hat && *est.phi_hat >= kMinPhi))
    raise(ErrorKind::InvalidParameter, "quasi-binomial interval needs phi_hat >= 1.001");
  if (family == ModelFamily::BetaBinomial && !(est.rho_hat && *est.rho_hat >= kMinRho))
    raise(ErrorKind::InvalidParameter, "beta-binomial interval needs rho_hat >= 1e-5");
}

double dispersion_of(const ParameterEstimates& est) {
  return est.family == ModelFamily::QuasiBinomial ? *est.phi_hat : *est.rho_hat;
}

IntervalResult wald_interval(Method method, const ParameterEstimates& est,
                             const FutureDesign& design, double total_n) {
  if (!(total_n > 0.0)) raise(ErrorKind::InvalidParameter, "sum of n_h must be positive");
  const double center = static_cast<double>(design.n_star) * est.pi_hat;
  const double se = prediction_se(est.family, est.pi_hat, dispersion_of(est), design.n_star, total_n);
  const double z = normal_quantile(1.0 - design.alpha / 2.0);
  return make_interval(method, center - z * se, center + z * se, design.alpha, design.n_star);
}

}  // namespace

IntervalResult qb_pi_uncalibrated(const ParameterEstimates& est, const FutureDesign& design,
                                  double total_n) {
  require_estimates(est, ModelFamily::QuasiBinomial);
  return wald_interval(Method::QbUncalibrated, est, design, total_n);
}

IntervalResult bb_pi_uncalibrated(const ParameterEstimates& est, const FutureDesign& design,
                                  double total_n) {
  require_estimates(est, ModelFamily::BetaBinomial);
  return wald_interval(Method::BbUncalibrated, est, design, total_n);
}

CalibrationReport calibrate_from_bootstrap(const BootstrapSample& bs, double alpha,
                                           double tolerance, const BisectionSettings& settings,
                                           Execution exec) {
  const double target = 1.0 - alpha / 2.0;
  const auto lower = bisect_coverage(
      [&](double q) { return lower_tail_coverage(bs, q, exec); }, target, tolerance, settings);
  const auto upper = bisect_coverage(
      [&](double q) { return upper_tail_coverage(bs, q, exec); }, target, tolerance, settings);

  CalibrationReport report;
  report.q_lower = lower.q;
  report.q_upper = upper.q;
  report.achieved_psi_lower = lower.achieved;
  report.achieved_psi_upper = upper.achieved;
  report.bootstrap_B = bs.size();
  report.iterations_lower = lower.iterations;
  report.iterations_upper = upper.iterations;
  report.tolerance = tolerance;
  report.redrawn = bs.redrawn;
  if (!lower.converged || !upper.converged)
    raise(ErrorKind::CalibrationNotConverged,
          fmt::format("bootstrap coverage missed {:.4f} +/- {}: lower {:.4f} at q = {:.4f}, "
                      "upper {:.4f} at q = {:.4f}",
                      target, tolerance, lower.achieved, lower.q, upper.achieved, upper.q));
  return report;
}

CalibrationReport calibrate_tails(const ParameterEstimates& est, const FutureDesign& design,
                                  std::span<const std::int64_t> cluster_design,
                                  const CalibrationOptions& options) {
  if (options.B < 1000) raise(ErrorKind::InvalidParameter, "calibration needs B >= 1000");
  if (!(options.tolerance > 0.0 && options.tolerance < design.alpha / 2.0))
    raise(ErrorKind::InvalidParameter, "tolerance must lie in (0, alpha / 2)");
  require_estimates(est, est.family);

  BootstrapSpec spec;
  spec.estimates = est;
  spec.design.assign(cluster_design.begin(), cluster_design.end());
  spec.n_star = design.n_star;
  spec.B = options.B;
  spec.stream = RngStream{options.seed, key(Purpose::Calibration)};
  spec.clamp_phi = options.clamp_bootstrap_phi;
  const auto bs = draw_bootstrap(spec, options.execution);
  return calibrate_from_bootstrap(bs, design.alpha, options.tolerance, options.bisection,
                                  options.execution);
}

namespace {

IntervalResult calibrated_interval(Method method, ModelFamily family, const HistoricalData& hcd,
                                   const FutureDesign& design, const CalibrationOptions& options) {
  const auto est = estimate(family, hcd, ZeroPolicy::AdjustIfDegenerate);
  const double total = est.zero_adjusted ? hcd.total_units() - 0.5 : hcd.total_units();
  const auto cluster_design = hcd.cluster_design();
  const auto report = calibrate_tails(est, design, cluster_design, options);

  const double center = static_cast<double>(design.n_star) * est.pi_hat;
  const double se = prediction_se(family, est.pi_hat, dispersion_of(est), design.n_star, total);
  auto result = make_interval(method, center - report.q_lower * se, center + report.q_upper * se,
                              design.alpha, design.n_star);
  result.calibration = report;
  return result;
}

}  // namespace

IntervalResult qb_pi_calibrated(const HistoricalData& hcd, const FutureDesign& design,
                                const CalibrationOptions& options) {
  return calibrated_interval(Method::QbCalibrated, ModelFamily::QuasiBinomial, hcd, design, options);
}

IntervalResult bb_pi_calibrated(const HistoricalData& hcd, const FutureDesign& design,
                                const CalibrationOptions& options) {
  return calibrated_interval(Method::BbCalibrated, ModelFamily::BetaBinomial, hcd, design, options);
}

}  // namespace hcl
