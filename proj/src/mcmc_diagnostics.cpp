#include "hcl/mcmc_diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "hcl/errors.hpp"

namespace hcl {
namespace {

ChainDraws split_chains(const ChainDraws& chains) {
  if (chains.empty()) raise(ErrorKind::EmptyDraws, "no chains");
  const std::size_t n = chains.front().size();
  for (const auto& c : chains)
    if (c.size() != n) raise(ErrorKind::InvalidParameter, "chains differ in length");
  const std::size_t half = n / 2;
  if (half < 2) raise(ErrorKind::InvalidParameter, "chains too short for split diagnostics");
  ChainDraws out;
  out.reserve(2 * chains.size());
  for (const auto& c : chains) {
    // An odd middle draw is dropped.
    out.emplace_back(c.begin(), c.begin() + static_cast<std::ptrdiff_t>(half));
    out.emplace_back(c.end() - static_cast<std::ptrdiff_t>(half), c.end());
  }
  return out;
}

double mean(const std::vector<double>& x) {
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double variance(const std::vector<double>& x, double m) {
  double ss = 0.0;
  for (double v : x) ss += (v - m) * (v - m);
  return ss / static_cast<double>(x.size() - 1);
}

struct VarianceParts {
  double within = 0.0;
  double var_plus = 0.0;
  std::vector<double> means;
};

VarianceParts variance_parts(const ChainDraws& seqs) {
  VarianceParts p;
  const double n = static_cast<double>(seqs.front().size());
  for (const auto& s : seqs) p.means.push_back(mean(s));
  for (std::size_t j = 0; j < seqs.size(); ++j) p.within += variance(seqs[j], p.means[j]);
  p.within /= static_cast<double>(seqs.size());
  const double between_over_n = variance(p.means, mean(p.means));
  p.var_plus = (n - 1.0) / n * p.within + between_over_n;
  return p;
}

}  // namespace

double split_rhat(const ChainDraws& chains) {
  const auto seqs = split_chains(chains);
  const auto p = variance_parts(seqs);
  if (!(p.within > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  return std::sqrt(p.var_plus / p.within);
}

double effective_sample_size(const ChainDraws& chains) {
  const auto seqs = split_chains(chains);
  const auto p = variance_parts(seqs);
  const std::size_t m = seqs.size();
  const std::size_t n = seqs.front().size();
  const double total = static_cast<double>(m * n);
  if (!(p.var_plus > 0.0)) return std::numeric_limits<double>::quiet_NaN();

  // Mean over sequences of the lag-t autocovariance (biased, 1/n).
  auto mean_autocov = [&](std::size_t t) {
    double acc = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      const auto& s = seqs[j];
      const double mu = p.means[j];
      double sum = 0.0;
      for (std::size_t i = 0; i + t < n; ++i) sum += (s[i] - mu) * (s[i + t] - mu);
      acc += sum / static_cast<double>(n);
    }
    return acc / static_cast<double>(m);
  };
  auto rho = [&](std::size_t t) { return 1.0 - (p.within - mean_autocov(t)) / p.var_plus; };

  double tau = -1.0;
  double prev_pair = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t + 1 < n; t += 2) {
    double pair = (t == 0 ? 1.0 : rho(t)) + rho(t + 1);
    if (pair < 0.0) break;
    pair = std::min(pair, prev_pair);
    prev_pair = pair;
    tau += 2.0 * pair;
  }
  tau = std::max(tau, 1.0 / std::log10(total));
  return total / tau;
}

}  // namespace hcl
