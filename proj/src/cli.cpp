#include "hcl/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <omp.h>

#include "hcl/errors.hpp"
#include "hcl/estimators.hpp"
#include "hcl/hcd_csv.hpp"
#include "hcl/methods.hpp"
#include "hcl/report.hpp"
#include "hcl/simulation.hpp"
#include "hcl/simulation_io.hpp"

namespace hcl {
namespace {

const std::vector<Method> kDefaultComputeMethods{
    Method::HistoricalRange, Method::NpChart,           Method::MeanKSd,  Method::BbCalibrated,
    Method::QbCalibrated,    Method::BayesHierarchical, Method::BayesGlmm};

const std::vector<Method> kDefaultSimulationMethods{
    Method::HistoricalRange, Method::NpChart,      Method::MeanKSd,
    Method::QbCalibrated,    Method::BbCalibrated, Method::BayesHierarchical,
    Method::BayesGlmm};

std::vector<Method> parse_methods(const std::string& spec, const std::vector<Method>& all) {
  if (spec == "all") return all;
  std::vector<Method> out;
  std::stringstream ss(spec);
  std::string tag;
  while (std::getline(ss, tag, ',')) {
    if (tag.empty()) continue;
    const auto m = method_from_string(tag);
    if (!m) raise(ErrorKind::InvalidParameter, fmt::format("unknown method '{}'", tag));
    out.push_back(*m);
  }
  if (out.empty()) raise(ErrorKind::InvalidParameter, "no methods selected");
  return out;
}

struct McmcFlags {
  std::optional<int> chains;
  std::optional<int> warmup;
  std::optional<int> samples;
  std::optional<double> kappa_shape;
  std::optional<double> kappa_rate;
  std::string config;

  void add_to(CLI::App& app) {
    app.add_option("--chains", chains, "MCMC chains (default 4)");
    app.add_option("--warmup", warmup, "Warmup iterations per chain (default 1000)");
    app.add_option("--samples", samples, "Retained draws per chain (default 1250)");
    app.add_option("--kappa-shape", kappa_shape, "Gamma prior shape for kappa (default 2)");
    app.add_option("--kappa-rate", kappa_rate, "Gamma prior rate for kappa (default 5e-5)");
    app.add_option("--config", config, "TOML file with a [bayes] table")->check(CLI::ExistingFile);
  }

  // Config file first, explicit flags override it.
  void apply(McmcConfig& m) const {
    if (!config.empty()) load_mcmc_overrides(config, m);
    if (chains) m.chains = *chains;
    if (warmup) m.warmup = *warmup;
    if (samples) m.samples_per_chain = *samples;
    if (kappa_shape) m.kappa_prior.shape = *kappa_shape;
    if (kappa_rate) m.kappa_prior.rate = *kappa_rate;
    m.validate();
  }
};

void set_threads(std::optional<int> threads) {
  int n = 0;
  if (threads) {
    n = *threads;
  } else if (const char* env = std::getenv("HCL_NUM_THREADS")) {
    n = std::atoi(env);
  }
  if (n > 0) omp_set_num_threads(n);
}

void record_mcmc_flags(std::map<std::string, std::string>& flags, const McmcConfig& m) {
  flags["chains"] = fmt::format("{}", m.chains);
  flags["warmup"] = fmt::format("{}", m.warmup);
  flags["samples"] = fmt::format("{}", m.samples_per_chain);
  flags["kappa-shape"] = fmt::format("{}", m.kappa_prior.shape);
  flags["kappa-rate"] = fmt::format("{}", m.kappa_prior.rate);
}

void log_run(std::ostream& err, const RunInfo& run) {
  err << fmt::format("hcl {} input={} sha256={} seed={}", run.tool_version,
                     run.input_path.empty() ? "-" : run.input_path,
                     run.input_sha256.empty() ? "-" : run.input_sha256, run.seed);
  for (const auto& [k, v] : run.flags) err << fmt::format(" --{}={}", k, v);
  err << '\n';
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(ErrorKind::Io, fmt::format("cannot open '{}'", path));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

MethodReport run_method(Method m, const HistoricalData& hcd, const FutureDesign& design,
                        const MethodOptions& opts) {
  MethodReport r;
  r.method = m;
  try {
    switch (m) {
      case Method::BayesHierarchical:
      case Method::BayesGlmm: {
        const auto fit = m == Method::BayesGlmm ? fit_glmm(hcd, design, opts.mcmc)
                                                : fit_hierarchical_bb(hcd, design, opts.mcmc);
        r.interval = fit.interval;
        r.mcmc = fit.parameters;
        break;
      }
      case Method::QbUncalibrated:
      case Method::QbCalibrated:
      case Method::BbUncalibrated:
      case Method::BbCalibrated: {
        const auto family = (m == Method::QbUncalibrated || m == Method::QbCalibrated)
                                ? ModelFamily::QuasiBinomial
                                : ModelFamily::BetaBinomial;
        const auto prepared = prepare_for_estimation(hcd, opts.zero_policy);
        r.estimates = estimate(family, prepared.data, ZeroPolicy::Never);
        r.estimates->zero_adjusted = prepared.adjusted;
        r.interval = compute_interval(m, hcd, design, opts);
        break;
      }
      default:
        r.interval = compute_interval(m, hcd, design, opts);
    }
  } catch (const NonConvergenceError& e) {
    r.interval.reset();
    r.mcmc = e.parameters();
    r.error = e.kind();
    r.error_message = e.what();
  } catch (const Error& e) {
    r.interval.reset();
    r.error = e.kind();
    r.error_message = e.what();
  }
  return r;
}

void emit(const std::string& text, const std::string& output, std::ostream& out) {
  if (output.empty() || output == "-") {
    out << text;
    return;
  }
  std::ofstream f(output, std::ios::binary);
  if (!f) raise(ErrorKind::Io, fmt::format("cannot write '{}'", output));
  f << text;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Prediction intervals and control limits from historical control data", "hcl"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));

  // compute
  auto* compute = app.add_subcommand("compute", "Limits for one historical data set");
  std::string input;
  std::string methods_spec = "all";
  double alpha = 0.05;
  std::optional<std::int64_t> n_future;
  std::size_t B = 10000;
  double tolerance = 0.001;
  double k = 2.0;
  std::uint64_t seed = 1;
  std::string format = "table";
  std::string output;
  std::optional<int> threads;
  McmcFlags compute_mcmc;
  compute->add_option("--input,-i", input, "CSV with columns study_id,y,n")->required();
  compute->add_option("--method,-m", methods_spec, "'all' or comma-separated method tags");
  compute->add_option("--alpha", alpha, "Nominal miss rate (default 0.05)");
  compute->add_option("--n-future", n_future, "Size n* of the future study (default: the common n)");
  compute->add_option("--B", B, "Bootstrap replicates for calibration (default 10000)");
  compute->add_option("--tolerance", tolerance, "Calibration tolerance (default 0.001)");
  compute->add_option("--k", k, "Multiplier for np-chart and mean +/- k SD (default 2)");
  compute->add_option("--seed", seed, "Master seed (default 1)");
  compute->add_option("--format", format, "table or json")->check(CLI::IsMember({"table", "json"}));
  compute->add_option("--output,-o", output, "Write the report here instead of stdout");
  compute->add_option("--threads", threads, "OpenMP threads (default: HCL_NUM_THREADS)");
  compute_mcmc.add_to(*compute);

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Coverage simulation over a grid of settings");
  std::string grid = "ltc";
  std::string sim_methods = "all";
  std::size_t S = 1000;
  std::size_t sim_B = 10000;
  double sim_alpha = 0.05;
  double sim_tolerance = 0.001;
  double sim_k = 2.0;
  std::uint64_t sim_seed = 1;
  std::string filter;
  std::string sim_output;
  std::optional<int> sim_threads;
  McmcFlags sim_mcmc;
  simulate->add_option("--grid", grid, "mnt, ltc or a TOML grid file");
  simulate->add_option("--methods", sim_methods, "'all' or comma-separated method tags");
  simulate->add_option("--S", S, "Replicates per setting (default 1000)");
  simulate->add_option("--B", sim_B, "Bootstrap replicates for calibration (default 10000)");
  simulate->add_option("--alpha", sim_alpha, "Nominal miss rate (default 0.05)");
  simulate->add_option("--tolerance", sim_tolerance, "Calibration tolerance (default 0.001)");
  simulate->add_option("--k", sim_k, "Multiplier for np-chart and mean +/- k SD (default 2)");
  simulate->add_option("--seed", sim_seed, "Master seed (default 1)");
  simulate->add_option("--filter", filter, "Restrict the grid, e.g. H=100,phi=500");
  simulate->add_option("--output,-o", sim_output, "CSV output (default stdout)");
  simulate->add_option("--threads", sim_threads, "OpenMP threads (default: HCL_NUM_THREADS)");
  sim_mcmc.add_to(*simulate);

  std::vector<std::string> argv(args.rbegin(), args.rend());
  try {
    app.parse(argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << kToolVersion << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << (compute->parsed() ? compute->help() : simulate->parsed() ? simulate->help() : app.help());
      return kExitOk;
    }
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (compute->parsed()) {
      set_threads(threads);
      const auto bytes = slurp(input);
      std::istringstream in(bytes);
      const auto hcd = read_hcd_csv(in);
      if (!n_future) {
        if (!hcd.constant_cluster_size())
          raise(ErrorKind::InvalidParameter, "cluster sizes differ; pass --n-future");
        n_future = static_cast<std::int64_t>(hcd[0].n);
      }
      const FutureDesign design(*n_future, alpha);
      const auto methods = parse_methods(methods_spec, kDefaultComputeMethods);

      MethodOptions opts;
      opts.k = k;
      opts.calibration.B = B;
      opts.calibration.tolerance = tolerance;
      opts.calibration.seed = seed;
      opts.mcmc.seed = seed;
      compute_mcmc.apply(opts.mcmc);

      ComputeReport report;
      report.run.input_path = input;
      report.run.input_sha256 = sha256_hex(bytes);
      report.run.seed = seed;
      auto& f = report.run.flags;
      f["method"] = methods_spec;
      f["alpha"] = fmt::format("{}", alpha);
      f["n-future"] = fmt::format("{}", *n_future);
      f["B"] = fmt::format("{}", B);
      f["tolerance"] = fmt::format("{}", tolerance);
      f["k"] = fmt::format("{}", k);
      f["format"] = format;
      record_mcmc_flags(f, opts.mcmc);
      report.studies = hcd.size();
      report.total_events = hcd.total_events();
      report.total_units = hcd.total_units();
      report.n_star = design.n_star;
      report.alpha = alpha;
      log_run(err, report.run);

      bool failed = false;
      for (auto m : methods) {
        report.methods.push_back(run_method(m, hcd, design, opts));
        if (report.methods.back().error) {
          failed = true;
          err << fmt::format("error: {}: {}: {}\n", to_string(m), to_string(*report.methods.back().error),
                             report.methods.back().error_message);
        }
      }
      if (format == "json") {
        emit(to_json(report), output, out);
      } else {
        std::ostringstream table;
        write_table(table, report);
        emit(table.str(), output, out);
      }
      return failed ? kExitError : kExitOk;
    }

    set_threads(sim_threads);
    McmcConfig mcmc;
    RunInfo run;
    run.seed = sim_seed;
    std::vector<SimulationSetting> settings;
    if (grid == "mnt") {
      settings = grid_mnt();
    } else if (grid == "ltc") {
      settings = grid_ltc();
    } else {
      run.input_path = grid;
      run.input_sha256 = sha256_hex(slurp(grid));
      settings = load_grid_toml(grid, &mcmc);
    }
    if (!filter.empty()) settings = filter_settings(settings, parse_filter(filter));
    if (settings.empty()) raise(ErrorKind::InvalidParameter, "no settings left after filtering");
    sim_mcmc.apply(mcmc);
    const auto methods = parse_methods(sim_methods, kDefaultSimulationMethods);

    run.flags["grid"] = grid;
    run.flags["methods"] = sim_methods;
    run.flags["S"] = fmt::format("{}", S);
    run.flags["B"] = fmt::format("{}", sim_B);
    run.flags["alpha"] = fmt::format("{}", sim_alpha);
    run.flags["tolerance"] = fmt::format("{}", sim_tolerance);
    run.flags["k"] = fmt::format("{}", sim_k);
    if (!filter.empty()) run.flags["filter"] = filter;
    record_mcmc_flags(run.flags, mcmc);
    log_run(err, run);

    std::ofstream file;
    std::ostream* sink = &out;
    if (!sim_output.empty() && sim_output != "-") {
      file.open(sim_output, std::ios::binary);
      if (!file) raise(ErrorKind::Io, fmt::format("cannot write '{}'", sim_output));
      sink = &file;
    }
    write_simulation_header(*sink);
    for (auto& s : settings) {
      s.S = S;
      s.alpha = sim_alpha;
      s.seed = sim_seed;
      s.methods = methods;
      s.options.k = sim_k;
      s.options.calibration.B = sim_B;
      s.options.calibration.tolerance = sim_tolerance;
      s.options.mcmc = mcmc;
      const auto summaries = run_setting(s);
      write_simulation_rows(*sink, s, summaries);
      sink->flush();
      err << fmt::format("setting {} done (H={}, pi={}, phi={})\n", s.id, s.H, s.pi, s.phi);
    }
    return kExitOk;
  } catch (const Error& e) {
    err << fmt::format("error: {}: {}\n", to_string(e.kind()), e.what());
    return kExitError;
  }
}

}  // namespace hcl
