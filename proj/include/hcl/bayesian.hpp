#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hcl/bootstrap_kernels.hpp"
#include "hcl/data_model.hpp"
#include "hcl/errors.hpp"
#include "hcl/rng.hpp"

namespace hcl {

/// Gamma(shape, rate) prior.
struct GammaPrior {
  double shape = 2.0;
  double rate = 5e-5;
};

struct McmcConfig {
  int chains = 4;
  int warmup = 1000;
  int samples_per_chain = 1250;
  int thin = 1;
  /// Prior on the beta precision kappa of the hierarchical model.
  GammaPrior kappa_prior{};
  /// GLMM intercept prior nu ~ N(0, sd^2).
  double nu_prior_sd = 10.0;
  /// GLMM random-effect SD prior sigma ~ Half-N(0, scale^2).
  double sigma_prior_scale = 5.0;
  double rhat_threshold = 1.05;
  double min_ess = 100.0;
  std::uint64_t seed = 1;
  Execution execution = Execution::Parallel;

  void validate() const;
  std::size_t total_draws() const noexcept {
    return static_cast<std::size_t>(chains) * static_cast<std::size_t>(samples_per_chain);
  }
};

struct ParameterSummary {
  std::string name;
  double mean = 0.0;
  double rhat = 0.0;
  double ess = 0.0;
};

struct PosteriorPredictiveFit {
  IntervalResult interval;
  std::vector<ParameterSummary> parameters;
  /// One predictive count per retained draw, chain-major.
  std::vector<std::int64_t> predictive;
  /// Post-warmup Metropolis acceptance rate per updated coordinate block.
  std::vector<double> acceptance;
  /// Posterior means of the study proportions (hierarchical model only).
  std::vector<double> study_proportion_means;
};

/// Thrown when a monitored hyperparameter has R-hat above the threshold or
/// too few effective draws. Carries the diagnostics that triggered it.
class NonConvergenceError : public Error {
 public:
  NonConvergenceError(const std::string& message, std::vector<ParameterSummary> parameters)
      : Error(ErrorKind::NonConvergence, message), parameters_(std::move(parameters)) {}

  const std::vector<ParameterSummary>& parameters() const noexcept { return parameters_; }

 private:
  std::vector<ParameterSummary> parameters_;
};

/// Conjugate full conditional of the study proportions:
/// pi_h ~ Beta(mu kappa + y_h, (1 - mu) kappa + n_h - y_h).
std::vector<double> draw_cluster_proportions(const HistoricalData& hcd, double mu, double kappa,
                                             Engine& rng);

/// Log posterior of (logit mu, log kappa) with the study proportions
/// integrated out, up to a constant. Includes the change-of-variables terms.
double hierarchical_log_posterior(const HistoricalData& hcd, double logit_mu, double log_kappa,
                                  const GammaPrior& kappa_prior);

/// Posterior predictive counts: pi* ~ Beta(mu kappa, (1 - mu) kappa), y* ~ Bin(n*, pi*).
std::vector<std::int64_t> hierarchical_predictive(std::span<const double> mu,
                                                  std::span<const double> kappa,
                                                  std::int64_t n_star, RngStream stream);

/// Posterior predictive counts: eta* = nu + N(0, sigma), y* ~ Bin(n*, logistic(eta*)).
std::vector<std::int64_t> glmm_predictive(std::span<const double> nu, std::span<const double> sigma,
                                          std::int64_t n_star, RngStream stream);

/// Nearest-rank quantiles at ranks ceil(C alpha/2) and ceil(C (1 - alpha/2)).
IntervalResult empirical_quantile_interval(std::span<const std::int64_t> draws, double alpha,
                                           std::int64_t n_star,
                                           Method method = Method::BayesHierarchical);

/// Hierarchical beta-binomial model in mean-precision form,
/// mu ~ U(0, 1), kappa ~ Gamma(a, b).
PosteriorPredictiveFit fit_hierarchical_bb(const HistoricalData& hcd, const FutureDesign& design,
                                           const McmcConfig& config);

/// Logit-normal GLMM eta_h = nu + beta_h, beta_h ~ N(0, sigma).
PosteriorPredictiveFit fit_glmm(const HistoricalData& hcd, const FutureDesign& design,
                                const McmcConfig& config);

}  // namespace hcl
