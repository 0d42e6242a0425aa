// Acceptance suite: one PASS/FAIL line per criterion.
//
//   hcl_acceptance            run every criterion
//   hcl_acceptance 2 5        run the listed criteria
//
// Exit status is 0 when every selected criterion passes, 77 when the only
// non-passing outcome is an MCMC non-convergence (environment-flaky), and 1
// otherwise.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "hcl/bayesian.hpp"
#include "hcl/bootstrap_kernels.hpp"
#include "hcl/errors.hpp"
#include "hcl/estimators.hpp"
#include "hcl/heuristics.hpp"
#include "hcl/prediction_intervals.hpp"
#include "hcl/samplers.hpp"
#include "hcl/simulation.hpp"

using namespace hcl;

namespace {

enum class Verdict { Pass, Fail, Flaky };

struct Outcome {
  Verdict verdict = Verdict::Fail;
  std::string detail;
};

Outcome check(bool ok, std::string detail) { return {ok ? Verdict::Pass : Verdict::Fail, std::move(detail)}; }

HistoricalData mortality() {
  const std::vector<double> y{15, 10, 12, 17, 11, 21, 13, 12, 17, 10};
  return HistoricalData::from_counts(y, std::vector<double>(y.size(), 50.0));
}

bool near(double x, double target, double tol) { return std::abs(x - target) <= tol; }

// ---------------------------------------------------------------------------

Outcome golden_deterministic() {
  const auto start = std::chrono::steady_clock::now();
  const auto hcd = mortality();
  double ymin = 1e9, ymax = -1e9, ysum = 0;
  for (const auto& s : hcd.studies()) {
    ymin = std::min(ymin, s.y);
    ymax = std::max(ymax, s.y);
    ysum += s.y;
  }
  const double pi = estimate_pi(hcd);
  const bool gates = near(pi, 0.276, 0.001) && ymin == 10 && ymax == 21 && near(ysum / 10, 13.8, 0.01);

  const auto range = historical_range(hcd);
  const auto np = np_chart(hcd, 50, 2.0);
  const auto msd = mean_k_sd(hcd, 2.0);
  const auto qb = estimate_quasibinomial(hcd);
  const auto bb = estimate_betabinomial(hcd);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  const bool ok = gates && range.lower == 10.0 && range.upper == 21.0 && near(np.lower, 7.47, 0.01) &&
                  near(np.upper, 20.12, 0.01) && near(msd.lower, 6.57, 0.01) && near(msd.upper, 21.03, 0.01) &&
                  near(*qb.phi_hat, 1.31, 0.01) && near(*bb.rho_hat, 0.00621, 0.0005) && secs < 1.0;
  return check(ok, fmt::format("range [{}, {}], np-chart [{:.3f}, {:.3f}], mean+/-2SD [{:.3f}, {:.3f}], "
                               "phi {:.4f}, rho {:.5f}, pi {:.4f}, {:.3f}s",
                               range.lower, range.upper, np.lower, np.upper, msd.lower, msd.upper, *qb.phi_hat,
                               *bb.rho_hat, pi, secs));
}

Outcome golden_stochastic() {
  const auto start = std::chrono::steady_clock::now();
  const auto hcd = mortality();
  const FutureDesign design(50, 0.05);
  bool within = true;
  int qb_match = 0, bb_match = 0;
  std::string detail;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    CalibrationOptions o;
    o.B = 10000;
    o.seed = seed;
    const auto q = qb_pi_calibrated(hcd, design, o);
    const auto b = bb_pi_calibrated(hcd, design, o);
    within = within && near(q.lower, 5.77, 0.5) && near(q.upper, 22.71, 0.5) && near(b.lower, 6.33, 0.5) &&
             near(b.upper, 22.24, 0.5);
    qb_match += q.covered.lo == 6 && q.covered.hi == 22;
    bb_match += b.covered.lo == 7 && b.covered.hi == 22;
    detail += fmt::format("seed {}: QB [{:.2f}, {:.2f}] BB [{:.2f}, {:.2f}]; ", seed, q.lower, q.upper, b.lower,
                          b.upper);
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return check(within && qb_match >= 4 && bb_match >= 4 && secs < 60.0,
               detail + fmt::format("covered ranges matched QB {}/5 BB {}/5, {:.1f}s", qb_match, bb_match, secs));
}

Outcome golden_bayesian() {
  const auto start = std::chrono::steady_clock::now();
  const auto hcd = mortality();
  const FutureDesign design(50, 0.05);
  McmcConfig config;
  config.chains = 4;
  config.samples_per_chain = 1250;
  config.kappa_prior = {2.0, 5e-3};
  config.seed = 1;
  try {
    const auto hier = fit_hierarchical_bb(hcd, design, config);
    const auto glmm = fit_glmm(hcd, design, config);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    double worst = 0;
    for (const auto* fit : {&hier, &glmm})
      for (const auto& p : fit->parameters) worst = std::max(worst, p.rhat);
    const bool ok = std::abs(hier.interval.covered.lo - 7) <= 1 && std::abs(hier.interval.covered.hi - 21) <= 1 &&
                    std::abs(glmm.interval.covered.lo - 6) <= 1 && std::abs(glmm.interval.covered.hi - 23) <= 1 &&
                    worst <= 1.05 && secs < 120.0;
    return check(ok, fmt::format("hierarchical [{}, {}], GLMM [{}, {}], C = {}, max R-hat {:.4f}, {:.2f}s",
                                 hier.interval.covered.lo, hier.interval.covered.hi, glmm.interval.covered.lo,
                                 glmm.interval.covered.hi, config.total_draws(), worst, secs));
  } catch (const NonConvergenceError& e) {
    return {Verdict::Flaky, fmt::format("NonConvergence reported: {}", e.what())};
  }
}

SimulationSetting desk_setting(int H, double pi, double phi, std::int64_t n, std::vector<Method> methods) {
  SimulationSetting s;
  s.H = H;
  s.pi = pi;
  s.phi = phi;
  s.n_h = n;
  s.n_star = n;
  s.S = 1000;
  s.methods = std::move(methods);
  s.options.calibration.B = 2000;
  s.seed = 20240101;
  return s;
}

std::string summary_text(const CoverageSummary& c) {
  return fmt::format("{} psi_cp {:.3f} (l {:.3f}, u {:.3f}, failures {})", to_string(c.method), c.psi_cp, c.psi_l,
                     c.psi_u, c.failures);
}

Outcome coverage_calibrated() {
  const auto start = std::chrono::steady_clock::now();
  const auto ltc = run_setting(desk_setting(10, 0.3, 1.5, 50, {Method::QbCalibrated, Method::BbCalibrated}));
  const auto mnt = run_setting(desk_setting(20, 0.01, 50, 18000, {Method::QbCalibrated, Method::BbCalibrated}));
  bool ok = true;
  std::string detail = "LTC: ";
  for (const auto& c : ltc) {
    ok = ok && c.psi_cp >= 0.925 && c.psi_cp <= 0.975;
    detail += summary_text(c) + "; ";
  }
  detail += "MNT: ";
  for (const auto& c : mnt) {
    ok = ok && c.psi_cp >= 0.92 && c.psi_cp <= 0.98;
    detail += summary_text(c) + "; ";
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return check(ok, detail + fmt::format("{:.1f}s", secs));
}

Outcome heuristics_fail() {
  const auto start = std::chrono::steady_clock::now();
  const auto np = run_setting(desk_setting(20, 0.1, 500, 18000, {Method::NpChart}))[0];
  const auto msd = run_setting(desk_setting(5, 0.1, 3, 50, {Method::MeanKSd}))[0];
  bool range_ok = true;
  double worst = 1.0;
  std::string worst_cell;
  int cells = 0;
  for (double pi : {0.001, 0.01, 0.1})
    for (double phi : {1.001, 3.0, 5.0, 10.0, 50.0, 500.0}) {
      const auto c = run_setting(desk_setting(100, pi, phi, 18000, {Method::HistoricalRange}))[0];
      ++cells;
      range_ok = range_ok && c.psi_cp > 0.98;
      if (c.psi_cp < worst) {
        worst = c.psi_cp;
        worst_cell = fmt::format("pi={}, phi={}", pi, phi);
      }
    }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return check(np.psi_cp < 0.6 && range_ok && msd.psi_cp < 0.93,
               fmt::format("np-chart (H=20, pi=0.1, phi=500) {:.3f}; hist-range at H=100 min over {} cells "
                           "{:.3f} ({}); mean+/-2SD (H=5, pi=0.1, phi=3) {:.3f}; {:.1f}s",
                           np.psi_cp, cells, worst, worst_cell, msd.psi_cp, secs));
}

Outcome equal_tails() {
  const auto start = std::chrono::steady_clock::now();
  const auto r = run_setting(desk_setting(20, 0.1, 3, 50, {Method::QbCalibrated, Method::BbCalibrated, Method::MeanKSd}));
  const double gap_msd = std::abs(r[2].psi_l - r[2].psi_u);
  const double gap_qb = std::abs(r[0].psi_l - r[0].psi_u);
  const double gap_bb = std::abs(r[1].psi_l - r[1].psi_u);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return check(gap_qb < gap_msd && gap_bb < gap_msd,
               fmt::format("|psi_l - psi_u|: qb-cal {:.3f}, bb-cal {:.3f}, mean-sd {:.3f}; {:.1f}s", gap_qb, gap_bb,
                           gap_msd, secs));
}

Outcome algebraic_identity() {
  // Every grid configuration with constant n and sum(n) >= 500.
  double worst = 0;
  std::string worst_cell;
  int cells = 0;
  struct Grid { std::vector<int> H; std::vector<double> pi, phi; std::int64_t n; };
  for (const auto& g : {Grid{{10, 20, 100}, {0.01, 0.1, 0.2, 0.3, 0.4, 0.5}, {1.001, 1.5, 3, 5}, 50},
                        Grid{{5, 10, 20, 100}, {0.001, 0.01, 0.1}, {1.001, 3, 5, 10, 50, 500}, 18000}})
    for (int H : g.H)
      for (double pi : g.pi)
        for (double phi : g.phi) {
          const double N = static_cast<double>(H * g.n);
          ParameterEstimates qb;
          qb.family = ModelFamily::QuasiBinomial;
          qb.pi_hat = pi;
          qb.phi_hat = phi;
          ParameterEstimates bb;
          bb.family = ModelFamily::BetaBinomial;
          bb.pi_hat = pi;
          bb.rho_hat = std::max(kMinRho, rho_from_phi(phi, static_cast<double>(g.n)));
          const FutureDesign d(g.n, 0.05);
          const auto a = qb_pi_uncalibrated(qb, d, N);
          const auto b = bb_pi_uncalibrated(bb, d, N);
          const double rel = std::abs((b.upper - b.lower) / (a.upper - a.lower) - 1.0);
          ++cells;
          if (rel > worst) {
            worst = rel;
            worst_cell = fmt::format("H={}, n={}, pi={}, phi={}", H, g.n, pi, phi);
          }
        }
  return check(worst <= 1e-3, fmt::format("max relative width difference {:.3e} over {} configurations ({})", worst,
                                          cells, worst_cell));
}

// Printed footnote values are truncated: printed <= rho < printed + one unit
// in the last printed digit.
bool matches_printed(double rho, double printed, double unit) { return rho >= printed - 1e-15 && rho < printed + unit; }

std::string moment_check(double pi, double rho, std::int64_t n, std::uint64_t seed, bool& ok) {
  const std::size_t N = 100000;
  const auto x = sample_betabinomial(pi, rho, n, N, RngStream{seed, 8});
  double mean = 0;
  for (auto v : x) mean += static_cast<double>(v);
  mean /= N;
  double m2 = 0, m4 = 0;
  for (auto v : x) {
    const double d = static_cast<double>(v) - mean;
    m2 += d * d;
    m4 += d * d * d * d;
  }
  const double var = m2 / (N - 1);
  m4 /= N;
  const double se_mean = std::sqrt(var / N), se_var = std::sqrt((m4 - var * var) / N);
  const double z_mean = (mean - n * pi) / se_mean;
  const double z_var = (var - betabinomial_variance(pi, rho, static_cast<double>(n))) / se_var;
  ok = ok && std::abs(z_mean) < 4 && std::abs(z_var) < 4;
  return fmt::format("z {:+.2f}/{:+.2f}", z_mean, z_var);
}

Outcome sampler_oracle() {
  struct Row { double phi; std::int64_t n; double printed, unit, pi; };
  const std::vector<Row> rows{
      {1.001, 18000, 5.5e-08, 1e-09, 0.01}, {3, 18000, 0.00011, 1e-05, 0.01},   {5, 18000, 0.00022, 1e-05, 0.01},
      {10, 18000, 0.00050, 1e-05, 0.01},     {50, 18000, 0.00272, 1e-05, 0.01}, {500, 18000, 0.02772, 1e-05, 0.01},
      {1.001, 50, 2.04e-05, 1e-07, 0.3},     {1.5, 50, 0.01020, 1e-05, 0.3},    {3, 50, 0.04081, 1e-05, 0.3},
      {5, 50, 0.08163, 1e-05, 0.3}};
  bool ok = true;
  std::string detail;
  std::uint64_t seed = 1;
  for (const auto& r : rows) {
    const double rho = rho_from_phi(r.phi, static_cast<double>(r.n));
    const bool printed_ok = matches_printed(rho, r.printed, r.unit);
    ok = ok && printed_ok;
    detail += fmt::format("phi={} n={} rho={:.6g} vs {} {} {}; ", r.phi, r.n, rho, r.printed,
                          printed_ok ? "ok" : "MISMATCH", moment_check(r.pi, rho, r.n, seed++, ok));
  }
  return check(ok, detail);
}

Outcome bisection_oracle() {
  bool ok = true;
  double worst = 0;
  const double tol = 0.001, target = 0.975;
  Engine gen(RngStream{2718, 0});
  for (int f = 0; f < 20; ++f) {
    const int H = 5 + static_cast<int>(gen() % 16);
    const std::int64_t n = 20 + static_cast<std::int64_t>(gen() % 181);
    const double pi = 0.05 + 0.45 * gen.uniform_open();
    const double rho = 0.001 + 0.05 * gen.uniform_open();
    std::vector<double> y, ns;
    for (int h = 0; h < H; ++h) {
      y.push_back(static_cast<double>(draw_betabinomial(pi, rho, n, gen)));
      ns.push_back(static_cast<double>(n));
    }
    const auto hcd = HistoricalData::from_counts(y, ns);
    BootstrapSpec spec;
    spec.estimates = estimate(f % 2 ? ModelFamily::QuasiBinomial : ModelFamily::BetaBinomial, hcd);
    spec.design = hcd.cluster_design();
    spec.n_star = n;
    spec.B = 2000;
    spec.stream = RngStream{static_cast<std::uint64_t>(f), 1};
    const auto bs = draw_bootstrap(spec);
    for (int tail = 0; tail < 2; ++tail) {
      auto cov = [&](double q) { return tail == 0 ? lower_tail_coverage(bs, q) : upper_tail_coverage(bs, q); };
      const auto bis = bisect_coverage(cov, target, tol);
      double q = 0.0;
      while (cov(q) < target - tol && q < 80.0) q += 0.001;
      const double diff = std::abs(cov(q) - bis.achieved);
      worst = std::max(worst, diff);
      ok = ok && diff <= tol;
    }
  }
  return check(ok, fmt::format("max |achieved(grid) - achieved(bisection)| = {:.5f} over 20 fixtures x 2 tails", worst));
}

Outcome conjugacy_oracle() {
  const auto hcd = HistoricalData::from_counts(std::vector<double>{0, 3, 9, 25, 40},
                                               std::vector<double>{20, 30, 40, 50, 60});
  const double mu = 0.35, kappa = 12.0;
  const int draws = 50000;
  std::vector<std::vector<double>> x(hcd.size());
  Engine rng(RngStream{314, 0});
  for (int i = 0; i < draws; ++i) {
    const auto p = draw_cluster_proportions(hcd, mu, kappa, rng);
    for (std::size_t h = 0; h < p.size(); ++h) x[h].push_back(p[h]);
  }
  bool ok = true;
  double worst = 0;
  for (std::size_t h = 0; h < hcd.size(); ++h) {
    const double a = mu * kappa + hcd[h].y, b = (1 - mu) * kappa + hcd[h].n - hcd[h].y;
    const double mean = a / (a + b), var = a * b / ((a + b) * (a + b) * (a + b + 1));
    double m = 0;
    for (double v : x[h]) m += v;
    m /= draws;
    double m2 = 0, m4 = 0;
    for (double v : x[h]) {
      m2 += (v - m) * (v - m);
      m4 += std::pow(v - m, 4);
    }
    m2 /= draws;
    m4 /= draws;
    const double z_mean = std::abs(m - mean) / std::sqrt(var / draws);
    const double z_var = std::abs(m2 - var) / std::sqrt((m4 - m2 * m2) / draws);
    worst = std::max({worst, z_mean, z_var});
    ok = ok && z_mean < 3 && z_var < 3;
  }
  return check(ok, fmt::format("max |z| of mean/variance over {} studies = {:.2f}", hcd.size(), worst));
}

struct Criterion {
  int id;
  const char* title;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all{
      {1, "golden numbers, deterministic", golden_deterministic},
      {2, "golden numbers, calibrated intervals", golden_stochastic},
      {3, "golden numbers, Bayesian intervals", golden_bayesian},
      {4, "coverage of calibrated intervals", coverage_calibrated},
      {5, "heuristics miss nominal coverage", heuristics_fail},
      {6, "equal-tail property", equal_tails},
      {7, "quasi-binomial vs beta-binomial width identity", algebraic_identity},
      {8, "sampler oracle", sampler_oracle},
      {9, "bisection oracle", bisection_oracle},
      {10, "conjugacy oracle", conjugacy_oracle},
  };
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));

  bool failed = false, flaky = false;
  for (const auto& c : all) {
    if (!selected.empty() && std::find(selected.begin(), selected.end(), c.id) == selected.end()) continue;
    Outcome o;
    try {
      o = c.run();
    } catch (const Error& e) {
      o = {Verdict::Fail, fmt::format("error {}: {}", to_string(e.kind()), e.what())};
    }
    const char* tag = o.verdict == Verdict::Pass ? "PASS" : o.verdict == Verdict::Flaky ? "FLAKY" : "FAIL";
    std::printf("[%s] criterion %d: %s: %s\n", tag, c.id, c.title, o.detail.c_str());
    std::fflush(stdout);
    failed |= o.verdict == Verdict::Fail;
    flaky |= o.verdict == Verdict::Flaky;
  }
  return failed ? 1 : flaky ? 77 : 0;
}
