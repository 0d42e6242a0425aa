#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "hcl/data_model.hpp"
#include "hcl/rng.hpp"

namespace hcl {

/// Serial reference or OpenMP-parallel execution of a kernel. Both produce
/// bit-identical results because every replicate owns its RNG stream.
enum class Execution { Serial, Parallel };

struct BootstrapSpec {
  ParameterEstimates estimates;
  std::vector<std::int64_t> design;
  std::int64_t n_star = 0;
  std::size_t B = 10000;
  RngStream stream;
  /// Apply the phi >= 1.001 floor to bootstrap re-estimates (quasi-binomial).
  bool clamp_phi = false;
  /// Replicates whose re-estimation fails are redrawn; more than this
  /// fraction of redrawn replicates is an error.
  double max_redraw_fraction = 0.10;
};

/// Per-replicate bootstrapped prediction centers n* pi_b, prediction standard
/// errors and future observations y*_b.
struct BootstrapSample {
  std::vector<double> centers;
  std::vector<double> std_errors;
  std::vector<std::int64_t> futures;
  std::size_t redrawn = 0;

  std::size_t size() const noexcept { return futures.size(); }
};

BootstrapSample draw_bootstrap(const BootstrapSpec& spec, Execution exec = Execution::Parallel);

/// Fraction of replicates with centers_b - q se_b <= y*_b.
double lower_tail_coverage(const BootstrapSample& bs, double q, Execution exec = Execution::Parallel);
/// Fraction of replicates with y*_b <= centers_b + q se_b.
double upper_tail_coverage(const BootstrapSample& bs, double q, Execution exec = Execution::Parallel);

}  // namespace hcl
