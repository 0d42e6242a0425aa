#include "hcl/samplers.hpp"

#include <cmath>
#include <random>

#include <fmt/format.h>

#include "hcl/errors.hpp"

namespace hcl {
namespace {

// log of a Gamma(shape, 1) draw. For shape < 1 the boost
// G(a) = G(a + 1) U^(1/a) is applied in log space so tiny shapes cannot
// underflow to zero.
double log_gamma_draw(double shape, Engine& rng) {
  if (shape >= 1.0) {
    std::gamma_distribution<double> gamma(shape, 1.0);
    return std::log(gamma(rng));
  }
  std::gamma_distribution<double> gamma(shape + 1.0, 1.0);
  return std::log(gamma(rng)) + std::log(rng.uniform_open()) / shape;
}

void check_pi(double pi) {
  if (!(pi > 0.0 && pi < 1.0))
    raise(ErrorKind::InvalidParameter, fmt::format("proportion {} not in (0, 1)", pi));
}

}  // namespace

double draw_gamma(double shape, Engine& rng) {
  if (!(shape > 0.0)) raise(ErrorKind::InvalidParameter, "gamma shape must be positive");
  return std::exp(log_gamma_draw(shape, rng));
}

double draw_beta(double a, double b, Engine& rng) {
  if (!(a > 0.0 && b > 0.0)) raise(ErrorKind::InvalidParameter, "beta shapes must be positive");
  if (a < kMinBetaShape || b < kMinBetaShape) return rng.uniform_open() < a / (a + b) ? 1.0 : 0.0;
  const double la = log_gamma_draw(a, rng);
  const double lb = log_gamma_draw(b, rng);
  return 1.0 / (1.0 + std::exp(lb - la));
}

std::int64_t draw_binomial(std::int64_t n, double p, Engine& rng) {
  if (p <= 0.0) return 0;
  if (p >= 1.0) return n;
  std::binomial_distribution<std::int64_t> binom(n, p);
  return binom(rng);
}

std::int64_t draw_betabinomial(double pi, double rho, std::int64_t n, Engine& rng) {
  if (rho <= 0.0) return draw_binomial(n, pi, rng);
  if (rho >= 1.0) return rng.uniform_open() < pi ? n : 0;
  const double scale = 1.0 / rho - 1.0;
  const double p = draw_beta(pi * scale, (1.0 - pi) * scale, rng);
  return draw_binomial(n, p, rng);
}

std::vector<std::int64_t> sample_betabinomial(double pi, double rho, std::int64_t n,
                                              std::size_t count, RngStream stream) {
  check_pi(pi);
  if (!(rho > 0.0 && rho < 1.0))
    raise(ErrorKind::InvalidParameter, fmt::format("rho {} not in (0, 1)", rho));
  if (n < 0) raise(ErrorKind::InvalidParameter, "cluster size must be non-negative");
  Engine rng(stream);
  std::vector<std::int64_t> out(count);
  for (auto& y : out) y = draw_betabinomial(pi, rho, n, rng);
  return out;
}

double rho_from_phi(double phi, double n) {
  if (!(n >= 2.0)) raise(ErrorKind::InvalidParameter, "rho_from_phi needs cluster size n >= 2");
  if (!(phi > 1.0)) raise(ErrorKind::InvalidParameter, "rho_from_phi needs phi > 1");
  return (phi - 1.0) / (n - 1.0);
}

std::int64_t draw_from_estimates(const ParameterEstimates& est, std::int64_t n, Engine& rng) {
  if (est.family == ModelFamily::BetaBinomial) return draw_betabinomial(est.pi_hat, *est.rho_hat, n, rng);
  // Clusters of one unit cannot carry overdispersion.
  const double rho = n >= 2 ? rho_from_phi(*est.phi_hat, static_cast<double>(n)) : 0.0;
  return draw_betabinomial(est.pi_hat, rho, n, rng);
}

namespace {

void check_estimates(const ParameterEstimates& est) {
  check_pi(est.pi_hat);
  if (est.family == ModelFamily::BetaBinomial) {
    if (!est.rho_hat || !(*est.rho_hat > 0.0))
      raise(ErrorKind::InvalidParameter, "beta-binomial estimates need rho > 0");
  } else if (!est.phi_hat || !(*est.phi_hat > 1.0)) {
    raise(ErrorKind::InvalidParameter, "quasi-binomial estimates need phi > 1");
  }
}

}  // namespace

HistoricalData bootstrap_hcd(const ParameterEstimates& est, std::span<const std::int64_t> design,
                             Engine& rng) {
  check_estimates(est);
  std::vector<Study> studies(design.size());
  for (std::size_t h = 0; h < design.size(); ++h) {
    studies[h].n = static_cast<double>(design[h]);
    studies[h].y = static_cast<double>(draw_from_estimates(est, design[h], rng));
  }
  return HistoricalData::from_studies(std::move(studies));
}

std::vector<std::int64_t> bootstrap_future(const ParameterEstimates& est, std::int64_t n_star,
                                           std::size_t count, RngStream stream) {
  check_estimates(est);
  Engine rng(stream);
  std::vector<std::int64_t> out(count);
  for (auto& y : out) y = draw_from_estimates(est, n_star, rng);
  return out;
}

}  // namespace hcl
