#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "hcl/bayesian.hpp"
#include "hcl/simulation.hpp"

namespace hcl {

/// `setting_id,method,H,pi,phi,n_h,n_star,S,psi_cp,psi_l,psi_u,mean_l,mean_u,failures`
void write_simulation_header(std::ostream& out);
void write_simulation_rows(std::ostream& out, const SimulationSetting& setting,
                           const std::vector<CoverageSummary>& summaries);

/// Custom grid file. Either explicit cells
///
///     [[setting]]
///     H = 10
///     pi = 0.3
///     phi = 1.5
///     n_h = 50        # n_star defaults to n_h
///
/// or a Cartesian block
///
///     [grid]
///     H = [5, 10]
///     pi = [0.1, 0.3]
///     phi = [1.5, 3.0]
///     n_h = 50
///
/// (both may appear; cells are numbered in file order). An optional [bayes]
/// table is applied to `mcmc` (see load_mcmc_overrides).
std::vector<SimulationSetting> load_grid_toml(const std::filesystem::path& path, McmcConfig* mcmc = nullptr);

/// Applies a `[bayes]` table: chains, warmup, samples, thin, kappa_shape,
/// kappa_rate, nu_prior_sd, sigma_prior_scale, rhat_threshold, min_ess.
void load_mcmc_overrides(const std::filesystem::path& path, McmcConfig& mcmc);

}  // namespace hcl
