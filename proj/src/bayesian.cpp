#include "hcl/bayesian.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <fmt/format.h>

#include "hcl/estimators.hpp"
#include "hcl/mcmc_diagnostics.hpp"
#include "hcl/samplers.hpp"

namespace hcl {

void McmcConfig::validate() const {
  if (chains < 2) raise(ErrorKind::InvalidParameter, "R-hat needs at least 2 chains");
  if (warmup < 1) raise(ErrorKind::InvalidParameter, "warmup must be at least 1");
  if (samples_per_chain < 4) raise(ErrorKind::InvalidParameter, "need at least 4 samples per chain");
  if (thin < 1) raise(ErrorKind::InvalidParameter, "thin must be at least 1");
  if (!(kappa_prior.shape > 0.0 && kappa_prior.rate > 0.0))
    raise(ErrorKind::InvalidParameter, "kappa prior shape and rate must be positive");
  if (!(nu_prior_sd > 0.0 && sigma_prior_scale > 0.0))
    raise(ErrorKind::InvalidParameter, "GLMM prior scales must be positive");
}

namespace {

double log_sigmoid(double x) { return x >= 0.0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x)); }
double sigmoid(double x) { return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x)); }
double softplus(double x) { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

/// Random-walk proposal scale tuned in batches during warmup toward an
/// acceptance rate of 0.44, then frozen.
class AdaptiveScale {
 public:
  explicit AdaptiveScale(double initial) : log_scale_(std::log(initial)) {}

  double scale() const { return std::exp(log_scale_); }

  void record(bool accepted, bool warmup) {
    if (warmup) {
      ++batch_proposed_;
      batch_accepted_ += accepted ? 1 : 0;
      if (batch_proposed_ == kBatch) adapt();
    } else {
      ++proposed_;
      accepted_ += accepted ? 1 : 0;
    }
  }

  double acceptance() const {
    return proposed_ == 0 ? 0.0 : static_cast<double>(accepted_) / static_cast<double>(proposed_);
  }

 private:
  static constexpr int kBatch = 50;

  void adapt() {
    ++batches_;
    const double rate = static_cast<double>(batch_accepted_) / kBatch;
    const double step = std::min(0.5, 1.0 / std::sqrt(static_cast<double>(batches_)));
    log_scale_ += rate > 0.44 ? step : -step;
    batch_accepted_ = 0;
    batch_proposed_ = 0;
  }

  double log_scale_;
  int batches_ = 0;
  int batch_accepted_ = 0;
  int batch_proposed_ = 0;
  long proposed_ = 0;
  long accepted_ = 0;
};

struct ChainOutput {
  std::vector<std::vector<double>> monitored;  // [parameter][draw]
  std::vector<double> acceptance;
  /// Sum over retained draws of each study proportion (hierarchical model).
  std::vector<double> study_sums;
};

/// One Metropolis step on coordinate `value` of a target whose log density
/// at the current state is `current`. Returns the (possibly new) log density.
template <class LogDensity>
double metropolis_step(double& value, double current, AdaptiveScale& scale, bool warmup,
                       Engine& rng, LogDensity&& log_density) {
  std::normal_distribution<double> step(0.0, scale.scale());
  const double old = value;
  value = old + step(rng);
  const double proposed = log_density();
  const bool accept = std::isfinite(proposed) && std::log(rng.uniform_open()) < proposed - current;
  scale.record(accept, warmup);
  if (accept) return proposed;
  value = old;
  return current;
}

template <class RunChain>
std::vector<ChainOutput> run_chains(const McmcConfig& config, RunChain&& run_chain) {
  std::vector<ChainOutput> out(static_cast<std::size_t>(config.chains));
  if (config.execution == Execution::Serial) {
    for (int c = 0; c < config.chains; ++c) out[c] = run_chain(c);
  } else {
#pragma omp parallel for schedule(dynamic)
    for (int c = 0; c < config.chains; ++c) out[c] = run_chain(c);
  }
  return out;
}

std::vector<ParameterSummary> summarize(const std::vector<ChainOutput>& chains,
                                        const std::vector<std::string>& names) {
  std::vector<ParameterSummary> out;
  for (std::size_t p = 0; p < names.size(); ++p) {
    ChainDraws draws;
    double sum = 0.0;
    std::size_t count = 0;
    for (const auto& c : chains) {
      draws.push_back(c.monitored[p]);
      sum += std::accumulate(c.monitored[p].begin(), c.monitored[p].end(), 0.0);
      count += c.monitored[p].size();
    }
    out.push_back({names[p], sum / static_cast<double>(count), split_rhat(draws),
                   effective_sample_size(draws)});
  }
  return out;
}

void check_convergence(const std::vector<ParameterSummary>& params, const McmcConfig& config,
                       std::string_view model) {
  for (const auto& p : params) {
    if (!(p.rhat <= config.rhat_threshold) || !(p.ess >= config.min_ess))
      throw NonConvergenceError(
          fmt::format("{}: parameter {} has R-hat {:.3f} (threshold {}) and ESS {:.0f} (minimum {})",
                      model, p.name, p.rhat, config.rhat_threshold, p.ess, config.min_ess),
          params);
  }
}

std::vector<double> flatten(const std::vector<ChainOutput>& chains, std::size_t p) {
  std::vector<double> out;
  for (const auto& c : chains) out.insert(out.end(), c.monitored[p].begin(), c.monitored[p].end());
  return out;
}

double pooled_start(const HistoricalData& hcd) {
  const double pi = (hcd.total_events() + 0.5) / (hcd.total_units() + 1.0);
  return std::clamp(pi, 1e-4, 1.0 - 1e-4);
}

}  // namespace

std::vector<double> draw_cluster_proportions(const HistoricalData& hcd, double mu, double kappa,
                                             Engine& rng) {
  std::vector<double> out(hcd.size());
  for (std::size_t h = 0; h < hcd.size(); ++h) {
    const auto& s = hcd[h];
    out[h] = draw_beta(mu * kappa + s.y, (1.0 - mu) * kappa + s.n - s.y, rng);
  }
  return out;
}

double hierarchical_log_posterior(const HistoricalData& hcd, double logit_mu, double log_kappa,
                                  const GammaPrior& kappa_prior) {
  const double mu = sigmoid(logit_mu);
  const double kappa = std::exp(log_kappa);
  const double a = mu * kappa;
  const double b = (1.0 - mu) * kappa;
  if (!(a > 0.0 && b > 0.0) || !std::isfinite(kappa)) return -INFINITY;
  const double lbeta_prior = std::lgamma(a) + std::lgamma(b) - std::lgamma(kappa);
  double ll = 0.0;
  for (const auto& s : hcd.studies()) {
    ll += std::lgamma(a + s.y) + std::lgamma(b + s.n - s.y) - std::lgamma(kappa + s.n) - lbeta_prior;
  }
  // mu ~ U(0, 1) on the logit scale; kappa ~ Gamma(shape, rate) on the log scale.
  const double log_prior = log_sigmoid(logit_mu) + log_sigmoid(-logit_mu) +
                           kappa_prior.shape * log_kappa - kappa_prior.rate * kappa;
  return ll + log_prior;
}

std::vector<std::int64_t> hierarchical_predictive(std::span<const double> mu,
                                                  std::span<const double> kappa,
                                                  std::int64_t n_star, RngStream stream) {
  if (mu.size() != kappa.size()) raise(ErrorKind::InvalidParameter, "draw vectors differ in length");
  Engine rng(stream);
  std::vector<std::int64_t> out(mu.size());
  for (std::size_t c = 0; c < mu.size(); ++c) {
    const double p = draw_beta(mu[c] * kappa[c], (1.0 - mu[c]) * kappa[c], rng);
    out[c] = draw_binomial(n_star, p, rng);
  }
  return out;
}

std::vector<std::int64_t> glmm_predictive(std::span<const double> nu, std::span<const double> sigma,
                                          std::int64_t n_star, RngStream stream) {
  if (nu.size() != sigma.size()) raise(ErrorKind::InvalidParameter, "draw vectors differ in length");
  Engine rng(stream);
  std::normal_distribution<double> std_normal(0.0, 1.0);
  std::vector<std::int64_t> out(nu.size());
  for (std::size_t c = 0; c < nu.size(); ++c) {
    const double eta = nu[c] + sigma[c] * std_normal(rng);
    out[c] = draw_binomial(n_star, sigmoid(eta), rng);
  }
  return out;
}

IntervalResult empirical_quantile_interval(std::span<const std::int64_t> draws, double alpha,
                                           std::int64_t n_star, Method method) {
  if (draws.empty()) raise(ErrorKind::EmptyDraws, "no predictive draws");
  if (!(alpha > 0.0 && alpha < 1.0)) raise(ErrorKind::InvalidParameter, "alpha outside (0, 1)");
  std::vector<std::int64_t> sorted(draws.begin(), draws.end());
  std::sort(sorted.begin(), sorted.end());
  const double C = static_cast<double>(sorted.size());
  auto nearest_rank = [&](double p) {
    // Guard ceil against representation error in C * p (e.g. 5000 * 0.025).
    const double rank = std::ceil(C * p - 1e-9);
    const auto r = static_cast<std::size_t>(std::clamp(rank, 1.0, C));
    return static_cast<double>(sorted[r - 1]);
  };
  return make_interval(method, nearest_rank(alpha / 2.0), nearest_rank(1.0 - alpha / 2.0), alpha,
                       n_star);
}

PosteriorPredictiveFit fit_hierarchical_bb(const HistoricalData& hcd, const FutureDesign& design,
                                           const McmcConfig& config) {
  config.validate();
  const RngStream root{config.seed, key(Purpose::McmcChain)};
  const double pi0 = pooled_start(hcd);
  double kappa0 = 100.0;
  if (hcd.size() >= 2) {
    const double rho = std::max(anova_icc(hcd, pi0), 1e-3);
    kappa0 = 1.0 / rho - 1.0;
  }

  auto run_chain = [&](int chain) {
    Engine rng(root.child({static_cast<std::uint64_t>(chain)}));
    std::normal_distribution<double> jitter(0.0, 1.0);
    double theta_mu = std::log(pi0 / (1.0 - pi0)) + 0.5 * jitter(rng);
    double theta_kappa = std::log(kappa0) + jitter(rng);
    AdaptiveScale scale_mu(0.1), scale_kappa(0.5);
    double lp = hierarchical_log_posterior(hcd, theta_mu, theta_kappa, config.kappa_prior);

    ChainOutput out;
    out.monitored.resize(2);
    out.study_sums.assign(hcd.size(), 0.0);
    const int iterations = config.warmup + config.samples_per_chain * config.thin;
    for (int it = 0; it < iterations; ++it) {
      const bool warmup = it < config.warmup;
      lp = metropolis_step(theta_mu, lp, scale_mu, warmup, rng, [&] {
        return hierarchical_log_posterior(hcd, theta_mu, theta_kappa, config.kappa_prior);
      });
      lp = metropolis_step(theta_kappa, lp, scale_kappa, warmup, rng, [&] {
        return hierarchical_log_posterior(hcd, theta_mu, theta_kappa, config.kappa_prior);
      });
      const double mu = sigmoid(theta_mu);
      const double kappa = std::exp(theta_kappa);
      // Gibbs refresh of the study proportions from their conjugate conditional.
      const auto pis = draw_cluster_proportions(hcd, mu, kappa, rng);
      if (!warmup && (it - config.warmup) % config.thin == 0) {
        out.monitored[0].push_back(mu);
        out.monitored[1].push_back(kappa);
        for (std::size_t h = 0; h < pis.size(); ++h) out.study_sums[h] += pis[h];
      }
    }
    out.acceptance = {scale_mu.acceptance(), scale_kappa.acceptance()};
    return out;
  };

  const auto chains = run_chains(config, run_chain);
  auto params = summarize(chains, {"mu", "kappa"});
  check_convergence(params, config, "hierarchical beta-binomial");

  const auto mu = flatten(chains, 0);
  const auto kappa = flatten(chains, 1);
  PosteriorPredictiveFit fit;
  fit.predictive = hierarchical_predictive(mu, kappa, design.n_star,
                                           RngStream{config.seed, key(Purpose::Predictive)});
  fit.interval = empirical_quantile_interval(fit.predictive, design.alpha, design.n_star,
                                             Method::BayesHierarchical);
  fit.parameters = std::move(params);
  fit.study_proportion_means.assign(hcd.size(), 0.0);
  for (const auto& c : chains) {
    fit.acceptance.insert(fit.acceptance.end(), c.acceptance.begin(), c.acceptance.end());
    for (std::size_t h = 0; h < hcd.size(); ++h)
      fit.study_proportion_means[h] += c.study_sums[h] / static_cast<double>(mu.size());
  }
  return fit;
}

namespace {

/// GLMM state in the non-centred form beta_h = sigma z_h.
struct GlmmState {
  double nu = 0.0;
  double log_sigma = 0.0;
  std::vector<double> z;
};

double glmm_log_lik_study(const Study& s, double eta) { return s.y * eta - s.n * softplus(eta); }

double glmm_log_posterior(const HistoricalData& hcd, const GlmmState& st, const McmcConfig& cfg) {
  const double sigma = std::exp(st.log_sigma);
  double lp = 0.0;
  for (std::size_t h = 0; h < hcd.size(); ++h) lp += glmm_log_lik_study(hcd[h], st.nu + sigma * st.z[h]);
  for (double z : st.z) lp -= 0.5 * z * z;
  lp -= 0.5 * st.nu * st.nu / (cfg.nu_prior_sd * cfg.nu_prior_sd);
  lp -= 0.5 * sigma * sigma / (cfg.sigma_prior_scale * cfg.sigma_prior_scale);
  return lp + st.log_sigma;
}

}  // namespace

PosteriorPredictiveFit fit_glmm(const HistoricalData& hcd, const FutureDesign& design,
                                const McmcConfig& config) {
  config.validate();
  const RngStream root{config.seed ^ 0x5bd1e995ULL, key(Purpose::McmcChain)};
  const double pi0 = pooled_start(hcd);
  const std::size_t H = hcd.size();

  auto run_chain = [&](int chain) {
    Engine rng(root.child({static_cast<std::uint64_t>(chain)}));
    std::normal_distribution<double> jitter(0.0, 1.0);
    GlmmState st;
    st.nu = std::log(pi0 / (1.0 - pi0)) + 0.5 * jitter(rng);
    st.log_sigma = std::log(0.2) + jitter(rng);
    st.z.resize(H);
    for (auto& z : st.z) z = jitter(rng);

    AdaptiveScale scale_nu(0.1), scale_sigma(0.5), scale_shift(0.1), scale_rescale(0.3);
    std::vector<AdaptiveScale> scale_z(H, AdaptiveScale(1.0));
    double lp = glmm_log_posterior(hcd, st, config);

    ChainOutput out;
    out.monitored.resize(2);
    const int iterations = config.warmup + config.samples_per_chain * config.thin;
    for (int it = 0; it < iterations; ++it) {
      const bool warmup = it < config.warmup;
      lp = metropolis_step(st.nu, lp, scale_nu, warmup, rng,
                           [&] { return glmm_log_posterior(hcd, st, config); });
      lp = metropolis_step(st.log_sigma, lp, scale_sigma, warmup, rng,
                           [&] { return glmm_log_posterior(hcd, st, config); });
      const double sigma = std::exp(st.log_sigma);
      for (std::size_t h = 0; h < H; ++h) {
        // Only study h's likelihood term and its own prior change.
        auto local = [&] {
          return glmm_log_lik_study(hcd[h], st.nu + sigma * st.z[h]) - 0.5 * st.z[h] * st.z[h];
        };
        const double before = local();
        const double after = metropolis_step(st.z[h], before, scale_z[h], warmup, rng, local);
        lp += after - before;
      }
      // Moves along which every eta_h = nu + sigma z_h stays fixed, so only
      // the prior terms change: a joint shift of nu against the z_h, and a
      // rescaling of sigma against the z_h (Jacobian exp(-H eps)).
      {
        std::normal_distribution<double> step(0.0, scale_shift.scale());
        const double delta = step(rng);
        const double sig = std::exp(st.log_sigma);
        GlmmState prop = st;
        prop.nu += delta;
        for (auto& z : prop.z) z -= delta / sig;
        const double lp_prop = glmm_log_posterior(hcd, prop, config);
        const bool accept = std::isfinite(lp_prop) && std::log(rng.uniform_open()) < lp_prop - lp;
        scale_shift.record(accept, warmup);
        if (accept) {
          st = std::move(prop);
          lp = lp_prop;
        }
      }
      {
        std::normal_distribution<double> step(0.0, scale_rescale.scale());
        const double eps = step(rng);
        GlmmState prop = st;
        prop.log_sigma += eps;
        const double shrink = std::exp(-eps);
        for (auto& z : prop.z) z *= shrink;
        const double lp_prop = glmm_log_posterior(hcd, prop, config);
        const double log_jacobian = -static_cast<double>(H) * eps;
        const bool accept =
            std::isfinite(lp_prop) && std::log(rng.uniform_open()) < lp_prop - lp + log_jacobian;
        scale_rescale.record(accept, warmup);
        if (accept) {
          st = std::move(prop);
          lp = lp_prop;
        }
      }
      if (!warmup && (it - config.warmup) % config.thin == 0) {
        out.monitored[0].push_back(st.nu);
        out.monitored[1].push_back(std::exp(st.log_sigma));
      }
    }
    out.acceptance = {scale_nu.acceptance(), scale_sigma.acceptance(), scale_shift.acceptance(),
                      scale_rescale.acceptance()};
    double z_acc = 0.0;
    for (const auto& s : scale_z) z_acc += s.acceptance();
    out.acceptance.push_back(H > 0 ? z_acc / static_cast<double>(H) : 0.0);
    return out;
  };

  const auto chains = run_chains(config, run_chain);
  auto params = summarize(chains, {"nu", "sigma"});
  check_convergence(params, config, "GLMM");

  const auto nu = flatten(chains, 0);
  const auto sigma = flatten(chains, 1);
  PosteriorPredictiveFit fit;
  fit.predictive = glmm_predictive(nu, sigma, design.n_star,
                                   RngStream{config.seed ^ 0x5bd1e995ULL, key(Purpose::Predictive)});
  fit.interval =
      empirical_quantile_interval(fit.predictive, design.alpha, design.n_star, Method::BayesGlmm);
  fit.parameters = std::move(params);
  for (const auto& c : chains)
    fit.acceptance.insert(fit.acceptance.end(), c.acceptance.begin(), c.acceptance.end());
  return fit;
}

}  // namespace hcl
