#include "hcl/simulation_io.hpp"

#include <ostream>

#include <fmt/format.h>
#define TOML_EXCEPTIONS 1
#include <toml.hpp>

#include "hcl/errors.hpp"

namespace hcl {

void write_simulation_header(std::ostream& out) {
  out << "setting_id,method,H,pi,phi,n_h,n_star,S,psi_cp,psi_l,psi_u,mean_l,mean_u,failures\n";
}

void write_simulation_rows(std::ostream& out, const SimulationSetting& st,
                           const std::vector<CoverageSummary>& summaries) {
  for (const auto& c : summaries) {
    out << fmt::format("{},{},{},{},{},{},{},{},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},{}\n", st.id,
                       to_string(c.method), st.H, st.pi, st.phi, st.n_h, st.n_star, st.S, c.psi_cp,
                       c.psi_l, c.psi_u, c.mean_lower, c.mean_upper, c.failures);
  }
}

namespace {

toml::table parse_file(const std::filesystem::path& path) {
  try {
    return toml::parse_file(path.string());
  } catch (const toml::parse_error& e) {
    raise(ErrorKind::MalformedInput, fmt::format("{}: {}", path.string(), e.description()));
  }
}

double number(const toml::node_view<const toml::node>& node, std::string_view name) {
  if (auto v = node.value<double>()) return *v;
  raise(ErrorKind::MalformedInput, fmt::format("'{}' must be a number", name));
}

std::vector<double> numbers(const toml::node_view<const toml::node>& node, std::string_view name) {
  if (const auto* arr = node.as_array()) {
    std::vector<double> out;
    for (const auto& el : *arr) {
      auto v = el.value<double>();
      if (!v) raise(ErrorKind::MalformedInput, fmt::format("'{}' holds a non-number", name));
      out.push_back(*v);
    }
    return out;
  }
  return {number(node, name)};
}

SimulationSetting cell(double H, double pi, double phi, double n_h, double n_star) {
  SimulationSetting s;
  s.H = static_cast<int>(H);
  s.pi = pi;
  s.phi = phi;
  s.n_h = static_cast<std::int64_t>(n_h);
  s.n_star = static_cast<std::int64_t>(n_star);
  s.validate();
  return s;
}

void apply_bayes(const toml::table& root, McmcConfig& mcmc) {
  const auto bayes = toml::node_view<const toml::node>(root)["bayes"];
  if (!bayes) return;
  auto set_int = [&](std::string_view k, int& field) {
    if (auto n = bayes[k]) field = static_cast<int>(number(n, k));
  };
  auto set_real = [&](std::string_view k, double& field) {
    if (auto n = bayes[k]) field = number(n, k);
  };
  set_int("chains", mcmc.chains);
  set_int("warmup", mcmc.warmup);
  set_int("samples", mcmc.samples_per_chain);
  set_int("thin", mcmc.thin);
  set_real("kappa_shape", mcmc.kappa_prior.shape);
  set_real("kappa_rate", mcmc.kappa_prior.rate);
  set_real("nu_prior_sd", mcmc.nu_prior_sd);
  set_real("sigma_prior_scale", mcmc.sigma_prior_scale);
  set_real("rhat_threshold", mcmc.rhat_threshold);
  set_real("min_ess", mcmc.min_ess);
  mcmc.validate();
}

}  // namespace

std::vector<SimulationSetting> load_grid_toml(const std::filesystem::path& path, McmcConfig* mcmc) {
  const auto root = parse_file(path);
  const toml::node_view<const toml::node> view(root);
  std::vector<SimulationSetting> out;

  if (const auto* cells = view["setting"].as_array()) {
    for (const auto& el : *cells) {
      const toml::node_view<const toml::node> c(el);
      const double n_h = number(c["n_h"], "n_h");
      out.push_back(cell(number(c["H"], "H"), number(c["pi"], "pi"), number(c["phi"], "phi"), n_h,
                         c["n_star"] ? number(c["n_star"], "n_star") : n_h));
    }
  }
  if (const auto grid = view["grid"]; grid) {
    const auto n_h = number(grid["n_h"], "n_h");
    const auto n_star = grid["n_star"] ? number(grid["n_star"], "n_star") : n_h;
    for (double H : numbers(grid["H"], "H"))
      for (double pi : numbers(grid["pi"], "pi"))
        for (double phi : numbers(grid["phi"], "phi")) out.push_back(cell(H, pi, phi, n_h, n_star));
  }
  if (out.empty())
    raise(ErrorKind::MalformedInput, fmt::format("{}: no [[setting]] or [grid] entries", path.string()));
  for (std::size_t i = 0; i < out.size(); ++i) out[i].id = i;
  if (mcmc) apply_bayes(root, *mcmc);
  return out;
}

void load_mcmc_overrides(const std::filesystem::path& path, McmcConfig& mcmc) {
  apply_bayes(parse_file(path), mcmc);
}

}  // namespace hcl
