#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fixtures.hpp"
#include "hcl/errors.hpp"
#include "hcl/estimators.hpp"
#include "hcl/samplers.hpp"

using namespace hcl;

namespace {

// Direct transcription of the ANOVA moment estimator from its definition.
double lui_icc(const std::vector<double>& y, const std::vector<double>& n) {
  const double H = static_cast<double>(y.size());
  const double N = std::accumulate(n.begin(), n.end(), 0.0);
  const double pi = std::accumulate(y.begin(), y.end(), 0.0) / N;
  double bms = 0, wms_num = 0, wms_den = 0, n2 = 0;
  for (std::size_t h = 0; h < y.size(); ++h) {
    const double p = y[h] / n[h];
    bms += n[h] * (p - pi) * (p - pi);
    wms_num += n[h] * p * (1 - p);
    wms_den += n[h] - 1;
    n2 += n[h] * n[h];
  }
  bms /= H - 1;
  const double wms = wms_num / wms_den;
  const double nA = (N - n2 / N) / (H - 1);
  return (bms - wms) / (bms + (nA - 1) * wms);
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const auto m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

HistoricalData simulate(double pi, double rho, std::int64_t n, int H, std::uint64_t seed) {
  Engine rng(RngStream{seed, 99});
  std::vector<double> y, ns;
  for (int h = 0; h < H; ++h) {
    y.push_back(static_cast<double>(draw_betabinomial(pi, rho, n, rng)));
    ns.push_back(static_cast<double>(n));
  }
  return HistoricalData::from_counts(y, ns);
}

}  // namespace

TEST_SUITE("estimators") {
  TEST_CASE("pooled proportion") {
    CHECK(estimate_pi(fixtures::mortality()) == doctest::Approx(0.276).epsilon(1e-12));
    CHECK(estimate_pi(fixtures::counts({0, 10}, {10, 10})) == 0.5);
    CHECK(estimate_pi(fixtures::counts({5, 5}, {50, 100})) == doctest::Approx(10.0 / 150.0));
  }

  TEST_CASE("duplicating every study leaves pi unchanged") {
    const auto a = fixtures::counts({3, 8, 1}, {20, 40, 10});
    const auto b = fixtures::counts({3, 8, 1, 3, 8, 1}, {20, 40, 10, 20, 40, 10});
    CHECK(estimate_pi(a) == doctest::Approx(estimate_pi(b)).epsilon(1e-15));
  }

  TEST_CASE("fixture dispersion by hand") {
    // sum (y - 13.8)^2 = 2022 - 10 * 13.8^2 = 117.6 ; n pi (1 - pi) = 9.9912
    const double phi_hand = 117.6 / 9.9912 / 9.0;
    const auto qb = estimate_quasibinomial(fixtures::mortality());
    CHECK(*qb.phi_hat == doctest::Approx(phi_hand).epsilon(1e-12));
    CHECK(*qb.phi_hat == doctest::Approx(1.31).epsilon(0.01 / 1.31));
    CHECK_FALSE(qb.clamped_phi);

    const std::vector<double> y{15, 10, 12, 17, 11, 21, 13, 12, 17, 10};
    const auto bb = estimate_betabinomial(fixtures::mortality());
    CHECK(*bb.rho_hat == doctest::Approx(lui_icc(y, std::vector<double>(10, 50))).epsilon(1e-12));
    CHECK(std::abs(*bb.rho_hat - 0.00621) < 0.0005);
    CHECK(bb.pi_hat == doctest::Approx(0.276));
  }

  TEST_CASE("ANOVA estimator with unequal cluster sizes") {
    const std::vector<double> y{3, 9, 4, 12}, n{20, 35, 18, 41};
    CHECK(anova_icc(HistoricalData::from_counts(y, n), estimate_pi(HistoricalData::from_counts(y, n))) ==
          doctest::Approx(lui_icc(y, n)).epsilon(1e-12));
  }

  TEST_CASE("floors") {
    const auto same = fixtures::counts({5, 5}, {50, 50});
    const auto qb = estimate_quasibinomial(same);
    CHECK(qb.raw_dispersion == 0.0);
    CHECK(*qb.phi_hat == kMinPhi);
    CHECK(qb.clamped_phi);
    const auto bb = estimate_betabinomial(same);
    CHECK(bb.raw_dispersion <= 0.0);
    CHECK(*bb.rho_hat == kMinRho);
    CHECK(bb.clamped_rho);
  }

  TEST_CASE("estimates never fall below the floors") {
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
      const auto hcd = simulate(0.2, 0.01, 30, 6, seed);
      if (hcd.all_zero() || hcd.all_full()) continue;
      CHECK(*estimate_quasibinomial(hcd).phi_hat >= kMinPhi);
      CHECK(*estimate_betabinomial(hcd).rho_hat >= kMinRho);
    }
  }

  TEST_CASE("too few studies") {
    const auto one = fixtures::counts({3}, {10});
    CHECK_THROWS_AS(estimate_quasibinomial(one), Error);
    CHECK_THROWS_AS(pearson_dispersion(one, 0.3), Error);
    CHECK_THROWS_AS(anova_icc(one, 0.3), Error);
  }

  TEST_CASE("permutation invariance") {
    const auto a = fixtures::counts({15, 10, 12, 17, 11, 21, 13, 12, 17, 10}, std::vector<double>(10, 50));
    const auto b = fixtures::counts({10, 17, 12, 13, 21, 11, 17, 12, 10, 15}, std::vector<double>(10, 50));
    CHECK(*estimate_quasibinomial(a).phi_hat == doctest::Approx(*estimate_quasibinomial(b).phi_hat).epsilon(1e-14));
    CHECK(*estimate_betabinomial(a).rho_hat == doctest::Approx(*estimate_betabinomial(b).rho_hat).epsilon(1e-14));
  }

  TEST_CASE("zero adjustment") {
    const auto zeros = fixtures::counts(std::vector<double>(10, 0), std::vector<double>(10, 50));
    const auto adj = apply_zero_adjustment(zeros);
    CHECK(adj[0].y == 0.5);
    CHECK(adj[0].n == 49.5);
    CHECK(adj[1].y == 0.0);
    CHECK(adj[1].n == 50.0);

    const auto adj2 = apply_zero_adjustment(fixtures::counts({0, 0}, {100, 100}));
    CHECK(adj2[0].y == 0.5);
    CHECK(adj2[0].n == 99.5);

    CHECK_THROWS_AS(apply_zero_adjustment(fixtures::counts({1, 0}, {50, 50})), Error);

    const auto full = apply_zero_adjustment(fixtures::counts({50, 50}, {50, 50}));
    CHECK(full[0].y == 49.0);
    CHECK(full[0].n == 49.5);
    CHECK(estimate_pi(full) < 1.0);
  }

  TEST_CASE("zero policy") {
    const auto zeros = fixtures::counts({0, 0, 0}, {50, 50, 50});
    try {
      estimate_betabinomial(zeros, ZeroPolicy::Never);
      FAIL("expected DegenerateAllZero");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::DegenerateAllZero);
    }
    const auto est = estimate_betabinomial(zeros, ZeroPolicy::AdjustIfDegenerate);
    CHECK(est.zero_adjusted);
    CHECK(est.pi_hat == doctest::Approx(0.5 / 149.5));
    const auto prepared = prepare_for_estimation(fixtures::mortality(), ZeroPolicy::AdjustIfDegenerate);
    CHECK_FALSE(prepared.adjusted);
    CHECK(prepared.data == fixtures::mortality());
  }

  TEST_CASE("beta-binomial estimator is consistent at rho = 0.04") {
    double sum = 0;
    for (std::uint64_t r = 0; r < 500; ++r) sum += estimate_betabinomial(simulate(0.3, 0.04, 50, 100, r)).raw_dispersion;
    CHECK(std::abs(sum / 500.0 - 0.04) < 0.01);
  }

  TEST_CASE("quasi-binomial and beta-binomial dispersions agree under constant n") {
    const double rho = rho_from_phi(3.0, 50);
    std::vector<double> phis, implied;
    for (std::uint64_t r = 0; r < 500; ++r) {
      const auto hcd = simulate(0.3, rho, 50, 100, 1000 + r);
      phis.push_back(estimate_quasibinomial(hcd).raw_dispersion);
      implied.push_back(phi_from_rho(estimate_betabinomial(hcd).raw_dispersion, 50));
    }
    CHECK(std::abs(median(phis) - median(implied)) < 0.2);
  }

  TEST_CASE("binomial data straddles the dispersion floor") {
    int clamped = 0;
    for (std::uint64_t r = 0; r < 1000; ++r) {
      Engine rng(RngStream{5, r});
      std::vector<double> y;
      for (int h = 0; h < 10; ++h) y.push_back(static_cast<double>(draw_binomial(50, 0.2, rng)));
      clamped += estimate_quasibinomial(HistoricalData::from_counts(y, std::vector<double>(10, 50))).clamped_phi;
    }
    CHECK(clamped > 400);
    CHECK(clamped < 700);
  }
}
