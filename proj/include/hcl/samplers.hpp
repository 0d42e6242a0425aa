#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "hcl/data_model.hpp"
#include "hcl/rng.hpp"

namespace hcl {

/// Shapes below this fall back to the two-point limit of the beta law.
inline constexpr double kMinBetaShape = 1e-6;

double draw_gamma(double shape, Engine& rng);
/// Beta(a, b); shapes below kMinBetaShape degenerate to Bernoulli(a / (a + b)).
double draw_beta(double a, double b, Engine& rng);
std::int64_t draw_binomial(std::int64_t n, double p, Engine& rng);

/// One beta-binomial count with mean n pi and intra-class correlation rho.
/// rho == 0 is plain binomial; rho >= 1 is the all-or-nothing limit.
std::int64_t draw_betabinomial(double pi, double rho, std::int64_t n, Engine& rng);

/// `count` i.i.d. beta-binomial draws. Requires 0 < pi < 1 and 0 < rho < 1.
std::vector<std::int64_t> sample_betabinomial(double pi, double rho, std::int64_t n,
                                              std::size_t count, RngStream stream);

/// Intra-class correlation matching dispersion phi at cluster size n:
/// (phi - 1) / (n - 1). Requires n >= 2 and phi > 1.
double rho_from_phi(double phi, double n);

/// Dispersion implied by rho at cluster size n: 1 + (n - 1) rho.
inline double phi_from_rho(double rho, double n) { return 1.0 + (n - 1.0) * rho; }

/// Beta-binomial variance n pi (1 - pi) (1 + (n - 1) rho).
inline double betabinomial_variance(double pi, double rho, double n) {
  return n * pi * (1.0 - pi) * (1.0 + (n - 1.0) * rho);
}

/// Draws one count of cluster size n from the process fitted in `est`.
/// The quasi-binomial family uses the per-cluster rho_h = rho_from_phi(phi, n).
std::int64_t draw_from_estimates(const ParameterEstimates& est, std::int64_t n, Engine& rng);

/// One synthetic HCD with the same cluster design.
HistoricalData bootstrap_hcd(const ParameterEstimates& est, std::span<const std::int64_t> design,
                             Engine& rng);

/// `count` synthetic future counts of size n*.
std::vector<std::int64_t> bootstrap_future(const ParameterEstimates& est, std::int64_t n_star,
                                           std::size_t count, RngStream stream);

}  // namespace hcl
