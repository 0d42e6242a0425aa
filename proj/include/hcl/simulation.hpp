#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "hcl/bootstrap_kernels.hpp"
#include "hcl/data_model.hpp"
#include "hcl/methods.hpp"
#include "hcl/rng.hpp"

namespace hcl {

/// One cell of a coverage experiment. Historical and future counts are drawn
/// from a beta-binomial with rho = rho_from_phi(phi, n).
struct SimulationSetting {
  std::size_t id = 0;
  int H = 10;
  double pi = 0.1;
  double phi = 1.001;
  std::int64_t n_h = 50;
  std::int64_t n_star = 50;
  std::size_t S = 1000;
  double alpha = 0.05;
  std::vector<Method> methods;
  MethodOptions options{};
  std::uint64_t seed = 1;

  /// Intra-class correlation of the historical clusters (0 when phi == 1).
  double rho_historical() const;
  double rho_future() const;
  void validate() const;
};

struct CoverageSummary {
  Method method = Method::HistoricalRange;
  double psi_cp = 0.0;
  double psi_l = 0.0;
  double psi_u = 0.0;
  double mean_lower = 0.0;
  double mean_upper = 0.0;
  /// Replicates where the method raised an error; excluded from the ratios.
  std::size_t failures = 0;
  std::size_t evaluated = 0;
  std::size_t hits = 0;
  std::size_t hits_lower = 0;
  std::size_t hits_upper = 0;
};

/// Interval rule used by the harness. The stream is private to the
/// (replicate, method) pair, for methods that need randomness.
using IntervalRule =
    std::function<IntervalResult(const HistoricalData& hcd, const FutureDesign& design, RngStream stream)>;

/// Coverage of an arbitrary interval rule over S replicates of `setting`.
/// `rule_index` keys the per-rule stream.
CoverageSummary evaluate_coverage(const SimulationSetting& setting, Method tag,
                                  const IntervalRule& rule, std::uint64_t rule_index = 0,
                                  Execution exec = Execution::Parallel);

/// Coverage of every method in `setting.methods`. All methods see the same
/// simulated historical data and future observations.
std::vector<CoverageSummary> run_setting(const SimulationSetting& setting,
                                         Execution exec = Execution::Parallel);

/// Micronucleus-test grid: H x pi x phi with n_h = n* = 18000 (72 settings).
std::vector<SimulationSetting> grid_mnt();
/// Long-term carcinogenicity grid: H x pi x phi with n_h = n* = 50 (96 settings).
std::vector<SimulationSetting> grid_ltc();

/// Keeps settings matching every `key=value` pair (keys H, pi, phi, n_h, n_star).
std::vector<SimulationSetting> filter_settings(const std::vector<SimulationSetting>& settings,
                                               const std::map<std::string, double>& filter);
std::map<std::string, double> parse_filter(const std::string& spec);

}  // namespace hcl
