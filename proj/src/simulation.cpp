#include "hcl/simulation.hpp"

#include <cmath>
#include <optional>
#include <sstream>

#include <fmt/format.h>

#include "hcl/errors.hpp"
#include "hcl/samplers.hpp"

namespace hcl {

double SimulationSetting::rho_historical() const {
  return phi > 1.0 ? rho_from_phi(phi, static_cast<double>(n_h)) : 0.0;
}

double SimulationSetting::rho_future() const {
  return phi > 1.0 ? rho_from_phi(phi, static_cast<double>(n_star)) : 0.0;
}

void SimulationSetting::validate() const {
  if (H < 1 || S < 1 || n_h < 2 || n_star < 1)
    raise(ErrorKind::InvalidParameter, "simulation setting needs H, S >= 1, n_h >= 2, n* >= 1");
  if (!(pi > 0.0 && pi < 1.0)) raise(ErrorKind::InvalidParameter, "pi must lie in (0, 1)");
  if (!(phi >= 1.0)) raise(ErrorKind::InvalidParameter, "phi must be >= 1");
  if (!(alpha > 0.0 && alpha < 1.0)) raise(ErrorKind::InvalidParameter, "alpha must lie in (0, 1)");
}

namespace {

struct Outcome {
  double lower = 0.0;
  double upper = 0.0;
  bool ok = false;
};

struct ReplicateData {
  HistoricalData hcd;
  std::int64_t future;
};

ReplicateData draw_replicate(const SimulationSetting& st, RngStream rep) {
  Engine hist_rng(rep.child({key(Purpose::HistoricalData)}));
  const double rho_h = st.rho_historical();
  std::vector<Study> studies(static_cast<std::size_t>(st.H));
  for (auto& s : studies) {
    s.n = static_cast<double>(st.n_h);
    s.y = static_cast<double>(draw_betabinomial(st.pi, rho_h, st.n_h, hist_rng));
  }
  Engine future_rng(rep.child({key(Purpose::FutureObservation)}));
  const auto future = draw_betabinomial(st.pi, st.rho_future(), st.n_star, future_rng);
  return {HistoricalData::from_studies(std::move(studies)), future};
}

RngStream replicate_stream(const SimulationSetting& st, std::size_t s) {
  return RngStream{st.seed, 0}.child({static_cast<std::uint64_t>(st.id), static_cast<std::uint64_t>(s)});
}

/// outcomes[s * rules + j]
std::vector<Outcome> simulate(const SimulationSetting& st, const std::vector<IntervalRule>& rules,
                              const std::vector<std::uint64_t>& rule_keys,
                              std::vector<std::int64_t>& futures, Execution exec) {
  st.validate();
  const FutureDesign design(st.n_star, st.alpha);
  const std::size_t R = rules.size();
  std::vector<Outcome> outcomes(st.S * R);
  futures.assign(st.S, 0);

  auto one = [&](std::size_t s) {
    const auto rep = replicate_stream(st, s);
    const auto data = draw_replicate(st, rep);
    futures[s] = data.future;
    for (std::size_t j = 0; j < R; ++j) {
      auto& out = outcomes[s * R + j];
      try {
        const auto interval = rules[j](data.hcd, design, rep.child({key(Purpose::Method), rule_keys[j]}));
        out = {interval.lower, interval.upper, true};
      } catch (const Error&) {
        out.ok = false;
      }
    }
  };

  const auto S = static_cast<std::int64_t>(st.S);
  if (exec == Execution::Serial) {
    for (std::int64_t s = 0; s < S; ++s) one(static_cast<std::size_t>(s));
  } else {
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t s = 0; s < S; ++s) one(static_cast<std::size_t>(s));
  }
  return outcomes;
}

CoverageSummary summarize(Method tag, const std::vector<Outcome>& outcomes,
                          const std::vector<std::int64_t>& futures, std::size_t j, std::size_t R) {
  CoverageSummary c;
  c.method = tag;
  double sum_l = 0.0;
  double sum_u = 0.0;
  for (std::size_t s = 0; s < futures.size(); ++s) {
    const auto& o = outcomes[s * R + j];
    if (!o.ok) {
      ++c.failures;
      continue;
    }
    const double y = static_cast<double>(futures[s]);
    const bool lower_ok = o.lower <= y;
    const bool upper_ok = y <= o.upper;
    ++c.evaluated;
    c.hits_lower += lower_ok ? 1 : 0;
    c.hits_upper += upper_ok ? 1 : 0;
    c.hits += (lower_ok && upper_ok) ? 1 : 0;
    sum_l += o.lower;
    sum_u += o.upper;
  }
  if (c.evaluated > 0) {
    const double n = static_cast<double>(c.evaluated);
    c.psi_cp = static_cast<double>(c.hits) / n;
    c.psi_l = static_cast<double>(c.hits_lower) / n;
    c.psi_u = static_cast<double>(c.hits_upper) / n;
    c.mean_lower = sum_l / n;
    c.mean_upper = sum_u / n;
  } else {
    c.psi_cp = c.psi_l = c.psi_u = c.mean_lower = c.mean_upper = std::nan("");
  }
  return c;
}

IntervalRule method_rule(Method m, const MethodOptions& base) {
  return [m, base](const HistoricalData& hcd, const FutureDesign& design, RngStream stream) {
    MethodOptions opts = base;
    // Replicates already run in parallel; keep the inner kernels serial.
    opts.calibration.seed = stream.child({1}).stream_id;
    opts.calibration.execution = Execution::Serial;
    opts.mcmc.seed = stream.child({2}).stream_id;
    opts.mcmc.execution = Execution::Serial;
    return compute_interval(m, hcd, design, opts);
  };
}

}  // namespace

CoverageSummary evaluate_coverage(const SimulationSetting& setting, Method tag,
                                  const IntervalRule& rule, std::uint64_t rule_index,
                                  Execution exec) {
  std::vector<std::int64_t> futures;
  const auto outcomes = simulate(setting, {rule}, {rule_index}, futures, exec);
  return summarize(tag, outcomes, futures, 0, 1);
}

std::vector<CoverageSummary> run_setting(const SimulationSetting& setting, Execution exec) {
  std::vector<IntervalRule> rules;
  std::vector<std::uint64_t> keys;
  for (auto m : setting.methods) {
    rules.push_back(method_rule(m, setting.options));
    keys.push_back(static_cast<std::uint64_t>(m));
  }
  std::vector<std::int64_t> futures;
  const auto outcomes = simulate(setting, rules, keys, futures, exec);
  std::vector<CoverageSummary> out;
  for (std::size_t j = 0; j < rules.size(); ++j)
    out.push_back(summarize(setting.methods[j], outcomes, futures, j, rules.size()));
  return out;
}

namespace {

std::vector<SimulationSetting> cartesian(const std::vector<int>& hs, const std::vector<double>& pis,
                                         const std::vector<double>& phis, std::int64_t n) {
  std::vector<SimulationSetting> out;
  for (int H : hs)
    for (double pi : pis)
      for (double phi : phis) {
        SimulationSetting s;
        s.id = out.size();
        s.H = H;
        s.pi = pi;
        s.phi = phi;
        s.n_h = n;
        s.n_star = n;
        out.push_back(s);
      }
  return out;
}

}  // namespace

std::vector<SimulationSetting> grid_mnt() {
  return cartesian({5, 10, 20, 100}, {0.001, 0.01, 0.1}, {1.001, 3, 5, 10, 50, 500}, 18000);
}

std::vector<SimulationSetting> grid_ltc() {
  return cartesian({5, 10, 20, 100}, {0.01, 0.1, 0.2, 0.3, 0.4, 0.5}, {1.001, 1.5, 3, 5}, 50);
}

std::map<std::string, double> parse_filter(const std::string& spec) {
  std::map<std::string, double> out;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos)
      raise(ErrorKind::MalformedInput, fmt::format("filter term '{}' is not key=value", item));
    const auto name = item.substr(0, eq);
    if (name != "H" && name != "pi" && name != "phi" && name != "n_h" && name != "n_star")
      raise(ErrorKind::MalformedInput, fmt::format("unknown filter key '{}'", name));
    try {
      out[name] = std::stod(item.substr(eq + 1));
    } catch (const std::exception&) {
      raise(ErrorKind::MalformedInput, fmt::format("filter value in '{}' is not a number", item));
    }
  }
  return out;
}

std::vector<SimulationSetting> filter_settings(const std::vector<SimulationSetting>& settings,
                                               const std::map<std::string, double>& filter) {
  auto same = [](double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(b)); };
  std::vector<SimulationSetting> out;
  for (const auto& s : settings) {
    bool keep = true;
    for (const auto& [name, value] : filter) {
      double field = 0.0;
      if (name == "H") field = s.H;
      else if (name == "pi") field = s.pi;
      else if (name == "phi") field = s.phi;
      else if (name == "n_h") field = static_cast<double>(s.n_h);
      else field = static_cast<double>(s.n_star);
      keep = keep && same(field, value);
    }
    if (keep) out.push_back(s);
  }
  return out;
}

}  // namespace hcl
