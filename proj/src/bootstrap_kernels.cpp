#include "hcl/bootstrap_kernels.hpp"

#include <cmath>

#include <fmt/format.h>

#include "hcl/errors.hpp"
#include "hcl/estimators.hpp"
#include "hcl/prediction_intervals.hpp"
#include "hcl/samplers.hpp"

namespace hcl {
namespace {

constexpr int kMaxAttempts = 50;

struct Replicate {
  double center = 0.0;
  double se = 0.0;
  std::int64_t future = 0;
  int attempts = 0;
  bool ok = false;
};

Replicate draw_replicate(const BootstrapSpec& spec, std::size_t b) {
  Replicate r;
  const auto& est = spec.estimates;
  const double ns = static_cast<double>(spec.n_star);
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    Engine rng(spec.stream.child({key(Purpose::Bootstrap), b, static_cast<std::uint64_t>(attempt)}));
    r.attempts = attempt + 1;
    try {
      const auto hcd_b = bootstrap_hcd(est, spec.design, rng);
      const auto est_b = estimate(est.family, hcd_b, ZeroPolicy::AdjustIfDegenerate);
      // Zero-adjusted data carries the reduced total.
      const double total = est_b.zero_adjusted ? hcd_b.total_units() - 0.5 : hcd_b.total_units();
      double dispersion = 0.0;
      if (est.family == ModelFamily::QuasiBinomial)
        dispersion = spec.clamp_phi ? *est_b.phi_hat : est_b.raw_dispersion;
      else
        dispersion = *est_b.rho_hat;
      r.center = ns * est_b.pi_hat;
      r.se = prediction_se(est.family, est_b.pi_hat, dispersion, spec.n_star, total);
      r.ok = std::isfinite(r.se);
      if (r.ok) break;
    } catch (const Error&) {
      // redraw
    }
  }
  Engine future_rng(spec.stream.child({key(Purpose::FutureObservation), b}));
  r.future = draw_from_estimates(est, spec.n_star, future_rng);
  return r;
}

}  // namespace

BootstrapSample draw_bootstrap(const BootstrapSpec& spec, Execution exec) {
  if (spec.B == 0) raise(ErrorKind::InvalidParameter, "bootstrap needs B >= 1");
  if (spec.design.empty()) raise(ErrorKind::InvalidParameter, "bootstrap design is empty");
  BootstrapSample out;
  out.centers.resize(spec.B);
  out.std_errors.resize(spec.B);
  out.futures.resize(spec.B);
  const auto B = static_cast<std::int64_t>(spec.B);
  std::size_t redrawn = 0;
  bool failed = false;

  auto store = [&](std::int64_t b, const Replicate& r) {
    out.centers[b] = r.center;
    out.std_errors[b] = r.se;
    out.futures[b] = r.future;
  };

  if (exec == Execution::Serial) {
    for (std::int64_t b = 0; b < B; ++b) {
      const auto r = draw_replicate(spec, static_cast<std::size_t>(b));
      store(b, r);
      redrawn += r.attempts > 1 ? 1 : 0;
      failed = failed || !r.ok;
    }
  } else {
#pragma omp parallel for schedule(static) reduction(+ : redrawn) reduction(|| : failed)
    for (std::int64_t b = 0; b < B; ++b) {
      const auto r = draw_replicate(spec, static_cast<std::size_t>(b));
      store(b, r);
      redrawn += r.attempts > 1 ? 1 : 0;
      failed = failed || !r.ok;
    }
  }
  out.redrawn = redrawn;
  if (failed || static_cast<double>(redrawn) > spec.max_redraw_fraction * static_cast<double>(spec.B))
    raise(ErrorKind::BootstrapDegenerate,
          fmt::format("{} of {} bootstrap replicates could not be estimated", redrawn, spec.B));
  return out;
}

namespace {

template <class Covered>
double tail_coverage(const BootstrapSample& bs, Execution exec, Covered covered) {
  const auto B = static_cast<std::int64_t>(bs.size());
  if (B == 0) return 0.0;
  std::int64_t hits = 0;
  if (exec == Execution::Serial) {
    for (std::int64_t b = 0; b < B; ++b) hits += covered(b) ? 1 : 0;
  } else {
#pragma omp parallel for schedule(static) reduction(+ : hits)
    for (std::int64_t b = 0; b < B; ++b) hits += covered(b) ? 1 : 0;
  }
  return static_cast<double>(hits) / static_cast<double>(B);
}

}  // namespace

double lower_tail_coverage(const BootstrapSample& bs, double q, Execution exec) {
  return tail_coverage(bs, exec, [&](std::int64_t b) {
    return bs.centers[b] - q * bs.std_errors[b] <= static_cast<double>(bs.futures[b]);
  });
}

double upper_tail_coverage(const BootstrapSample& bs, double q, Execution exec) {
  return tail_coverage(bs, exec, [&](std::int64_t b) {
    return static_cast<double>(bs.futures[b]) <= bs.centers[b] + q * bs.std_errors[b];
  });
}

}  // namespace hcl
