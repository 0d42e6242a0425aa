#include "hcl/report.hpp"

#include <cmath>
#include <ostream>

#include <fmt/format.h>
#include <json.hpp>
#include <openssl/evp.h>

namespace hcl {
namespace {

using nlohmann::ordered_json;

ordered_json estimates_json(const ParameterEstimates& e) {
  ordered_json j;
  j["family"] = std::string(to_string(e.family));
  j["pi_hat"] = e.pi_hat;
  if (e.phi_hat) j["phi_hat"] = *e.phi_hat;
  if (e.rho_hat) j["rho_hat"] = *e.rho_hat;
  j["raw_dispersion"] = e.raw_dispersion;
  j["clamped_phi"] = e.clamped_phi;
  j["clamped_rho"] = e.clamped_rho;
  j["zero_adjusted"] = e.zero_adjusted;
  return j;
}

ordered_json interval_json(const IntervalResult& r) {
  ordered_json j;
  j["lower"] = r.lower;
  j["upper"] = r.upper;
  if (r.covered.empty()) {
    j["covered_range"] = nullptr;
  } else {
    j["covered_range"] = {r.covered.lo, r.covered.hi};
  }
  j["alpha"] = r.alpha ? ordered_json(*r.alpha) : ordered_json(nullptr);
  j["n_star"] = r.n_star;
  if (r.calibration) {
    const auto& c = *r.calibration;
    j["calibration"] = {{"q_lower", c.q_lower},
                        {"q_upper", c.q_upper},
                        {"achieved_psi_lower", c.achieved_psi_lower},
                        {"achieved_psi_upper", c.achieved_psi_upper},
                        {"bootstrap_B", c.bootstrap_B},
                        {"iterations_lower", c.iterations_lower},
                        {"iterations_upper", c.iterations_upper},
                        {"tolerance", c.tolerance},
                        {"redrawn", c.redrawn}};
  }
  return j;
}

std::string limit_cell(double value, std::int64_t covered) {
  return fmt::format("{:.2f} ({})", value, covered);
}

}  // namespace

std::string to_json(const ComputeReport& report) {
  ordered_json j;
  j["schema"] = std::string(kReportSchema);
  ordered_json run;
  run["tool_version"] = report.run.tool_version;
  run["input"] = report.run.input_path;
  run["input_sha256"] = report.run.input_sha256;
  run["seed"] = report.run.seed;
  run["flags"] = report.run.flags;
  j["run"] = run;
  j["data"] = {{"studies", report.studies},
               {"total_events", report.total_events},
               {"total_units", report.total_units}};
  j["n_star"] = report.n_star;
  j["alpha"] = report.alpha;
  ordered_json methods = ordered_json::array();
  for (const auto& m : report.methods) {
    ordered_json e;
    e["method"] = std::string(to_string(m.method));
    e["label"] = std::string(display_name(m.method));
    if (m.interval) e["interval"] = interval_json(*m.interval);
    if (m.estimates) e["estimates"] = estimates_json(*m.estimates);
    if (!m.mcmc.empty()) {
      ordered_json diag = ordered_json::array();
      for (const auto& p : m.mcmc)
        diag.push_back({{"parameter", p.name},
                        {"mean", p.mean},
                        {"rhat", std::isfinite(p.rhat) ? ordered_json(p.rhat) : ordered_json(nullptr)},
                        {"ess", std::isfinite(p.ess) ? ordered_json(p.ess) : ordered_json(nullptr)}});
      e["mcmc"] = diag;
    }
    if (m.error) e["error"] = {{"kind", std::string(to_string(*m.error))}, {"message", m.error_message}};
    methods.push_back(e);
  }
  j["methods"] = methods;
  return j.dump(2) + "\n";
}

void write_table(std::ostream& out, const ComputeReport& report) {
  out << fmt::format("Control limits for n* = {}, alpha = {} ({} historical studies, {} / {} events)\n",
                     report.n_star, report.alpha, report.studies, report.total_events,
                     report.total_units);
  out << fmt::format("{:<32}{:>16}{:>16}{:>18}\n", "Method", "Lower CL", "Upper CL", "Interval width");
  for (const auto& m : report.methods) {
    if (!m.interval) {
      out << fmt::format("{:<32}  error: {}: {}\n", display_name(m.method),
                         m.error ? to_string(*m.error) : "", m.error_message);
      continue;
    }
    const auto& r = *m.interval;
    const auto width_covered = r.covered.empty() ? 0 : r.covered.hi - r.covered.lo;
    out << fmt::format("{:<32}{:>16}{:>16}{:>18}\n", display_name(m.method),
                       limit_cell(r.lower, r.covered.lo), limit_cell(r.upper, r.covered.hi),
                       limit_cell(r.upper - r.lower, width_covered));
  }
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr);
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", digest[i]);
  return hex;
}

}  // namespace hcl
