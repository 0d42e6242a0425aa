#include "hcl/methods.hpp"

#include "hcl/heuristics.hpp"

namespace hcl {

IntervalResult compute_interval(Method method, const HistoricalData& hcd,
                                const FutureDesign& design, const MethodOptions& options) {
  switch (method) {
    case Method::HistoricalRange:
      return historical_range(hcd);
    case Method::NpChart:
      return np_chart(prepare_for_estimation(hcd, options.zero_policy).data, design.n_star, options.k);
    case Method::MeanKSd:
      return mean_k_sd(hcd, options.k);
    case Method::QbUncalibrated: {
      const auto prepared = prepare_for_estimation(hcd, options.zero_policy);
      return qb_pi_uncalibrated(estimate_quasibinomial(prepared.data, ZeroPolicy::Never), design,
                                prepared.data.total_units());
    }
    case Method::BbUncalibrated: {
      const auto prepared = prepare_for_estimation(hcd, options.zero_policy);
      return bb_pi_uncalibrated(estimate_betabinomial(prepared.data, ZeroPolicy::Never), design,
                                prepared.data.total_units());
    }
    case Method::QbCalibrated:
      return qb_pi_calibrated(hcd, design, options.calibration);
    case Method::BbCalibrated:
      return bb_pi_calibrated(hcd, design, options.calibration);
    case Method::BayesHierarchical:
      return fit_hierarchical_bb(hcd, design, options.mcmc).interval;
    case Method::BayesGlmm:
      return fit_glmm(hcd, design, options.mcmc).interval;
  }
  raise(ErrorKind::InvalidParameter, "unknown method");
}

}  // namespace hcl
