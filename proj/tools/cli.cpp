#include "cli.hpp"

#include <CLI11.hpp>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "cvxrich/confidence.hpp"
#include "cvxrich/errors.hpp"
#include "cvxrich/estimators.hpp"
#include "cvxrich/frequency_table.hpp"
#include "cvxrich/sampling.hpp"
#include "cvxrich/serialize.hpp"
#include "cvxrich/study.hpp"

namespace cvxrich::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Options {
  std::string input;
  std::string method = "auto";
  std::string ci = "auto";
  double alpha = 0.05;
  std::optional<std::uint64_t> seed;
  std::uint64_t stream = 0;
  int n_sims = kDefaultSimulations;
  int n_boot = kDefaultSimulations;
  double knot_tol = kKnotTolerance;
  std::string output = "text";
  std::string out_dir;
  bool verbose = false;

  // simulate
  std::string truth = "gamma_poisson_threshold";
  double nu = 1.1;
  std::int64_t n_species = 1000;
  std::string sampling = "direct";

  // study
  std::optional<std::string> scale;
  int workers = 0;
};

SeedSpec resolve_seed(const Options& o) {
  if (o.seed) return {*o.seed, o.stream};
  if (const char* env = std::getenv("CVXRICH_SEED"); env && *env) {
    char* end = nullptr;
    const auto value = std::strtoull(env, &end, 10);
    if (*end != '\0') {
      throw InputError(std::string("CVXRICH_SEED is not an integer: ") + env);
    }
    return {value, o.stream};
  }
  return {0, o.stream};
}

std::string fmt(double v, const char* spec = "%.6g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
  if (!out) throw InputError("cannot write " + path.string());
}

ConvexLseOptions lse_options(const Options& o) {
  ConvexLseOptions lse;
  lse.knot_tol = o.knot_tol;
  return lse;
}

// --- estimate -------------------------------------------------------------

struct EstimateSelection {
  std::vector<EstimatorMethod> estimators;
  std::vector<IntervalMethod> intervals;
};

EstimateSelection select(const Options& o) {
  EstimateSelection s;
  if (o.method == "all") {
    s.estimators = {EstimatorMethod::empirical, EstimatorMethod::convex,
                    EstimatorMethod::chao84};
  } else if (o.method == "auto") {
    s.estimators = {EstimatorMethod::empirical, EstimatorMethod::convex};
  } else {
    s.estimators = {parse_estimator_method(o.method)};
  }

  if (o.ci == "all") {
    s.intervals = {IntervalMethod::empirical, IntervalMethod::plugin,
                   IntervalMethod::bootstrap};
  } else if (o.ci == "none") {
  } else if (o.ci == "auto") {
    // Each estimator gets its natural interval; chao84 has none here.
    for (const auto m : s.estimators) {
      if (m == EstimatorMethod::empirical) s.intervals.push_back(IntervalMethod::empirical);
      if (m == EstimatorMethod::convex) s.intervals.push_back(IntervalMethod::plugin);
    }
  } else {
    s.intervals = {parse_interval_method(o.ci)};
  }
  return s;
}

EstimatorMethod base_of(IntervalMethod m) {
  return m == IntervalMethod::empirical ? EstimatorMethod::empirical
                                        : EstimatorMethod::convex;
}

int cmd_estimate(const Options& o, std::ostream& out) {
  if (!(o.alpha > 0.0 && o.alpha < 1.0)) throw InputError("--alpha must lie in (0, 1)");
  const auto selection = select(o);
  const auto seed = resolve_seed(o);
  const auto table = read_frequency_file(o.input);
  if (table.empty()) throw InputError(o.input + ": no observed species");
  const auto lse = lse_options(o);

  std::vector<Estimate> estimates;
  for (const auto m : selection.estimators) estimates.push_back(estimate(m, table, lse));

  auto find_or_add = [&](EstimatorMethod m) -> const Estimate& {
    for (const auto& e : estimates) {
      if (e.method == m) return e;
    }
    estimates.push_back(estimate(m, table, lse));
    return estimates.back();
  };

  std::vector<IntervalReport> intervals;
  for (const auto m : selection.intervals) {
    switch (m) {
      case IntervalMethod::empirical:
        find_or_add(EstimatorMethod::empirical);
        intervals.push_back(ci_empirical(table, o.alpha));
        break;
      case IntervalMethod::plugin:
        intervals.push_back(ci_plugin(find_or_add(EstimatorMethod::convex),
                                      o.alpha, o.n_sims, seed));
        break;
      case IntervalMethod::bootstrap:
        intervals.push_back(ci_bootstrap(find_or_add(EstimatorMethod::convex),
                                         o.alpha, o.n_boot, seed, lse));
        break;
    }
  }

  if (o.output == "json") {
    json doc{{"input", o.input},
             {"observed", table.observed()},
             {"estimates", estimates},
             {"intervals", intervals}};
    out << doc.dump(2) << '\n';
  } else if (o.output == "csv") {
    out << interval_csv_header() << '\n';
    for (const auto& e : estimates) {
      bool has_interval = false;
      for (const auto& r : intervals) {
        if (base_of(r.method) == e.method) has_interval = true;
      }
      if (!has_interval) {
        out << to_string(e.method) << ",," << fmt(e.n_hat_real, "%.10g")
            << ",,,,\n";
      }
    }
    for (const auto& r : intervals) out << interval_csv_row(r) << '\n';
  } else {
    out << "observed species D = " << table.observed()
        << ", S1 = " << table.count(1) << ", S2 = " << table.count(2) << '\n';
    for (const auto& e : estimates) {
      std::string line = std::string(to_string(e.method));
      line.resize(10, ' ');
      line += std::to_string(e.n_hat);
      bool first = true;
      for (const auto& r : intervals) {
        if (base_of(r.method) != e.method) continue;
        line += first ? " " : "  ";
        line += "(" + std::to_string(r.lower_int) + ", " +
                std::to_string(r.upper_int) + ")";
        if (e.method == EstimatorMethod::convex) {
          line += " " + std::string(to_string(r.method));
        }
        if (o.verbose) {
          line += " [" + fmt(r.lower, "%.3f") + ", " + fmt(r.upper, "%.3f") + "]";
        }
        first = false;
      }
      if (o.verbose) {
        line += "  theta " + fmt(e.theta_hat, "%.6f");
        if (e.clamped()) line += " (clamped)";
      }
      out << line << '\n';
    }
    for (const auto& r : intervals) {
      for (const auto& w : r.warnings) out << "warning: " << w << '\n';
    }
  }
  return kOk;
}

// --- project --------------------------------------------------------------

int cmd_project(const Options& o, std::ostream& out) {
  const auto table = read_frequency_file(o.input);
  const auto f = empirical_freq(table);
  const auto fit = convex_lse(f, lse_options(o));

  std::ostringstream tsv;
  tsv << "j\tf\tphat\n";
  const auto last = std::max(f.support_max(), fit.phat.support_max());
  for (std::size_t j = 1; j <= last; ++j) {
    tsv << j << '\t' << fmt(f[j], "%.12g") << '\t' << fmt(fit.phat[j], "%.12g")
        << '\n';
  }

  if (!o.out_dir.empty()) {
    fs::create_directories(o.out_dir);
    write_file(fs::path(o.out_dir) / "projection.tsv", tsv.str());
    write_file(fs::path(o.out_dir) / "fit.json", json(fit).dump(2) + "\n");
  }

  if (o.output == "json") {
    out << json(fit).dump(2) << '\n';
  } else if (o.output == "csv") {
    std::string text = tsv.str();
    for (auto& c : text) {
      if (c == '\t') c = ',';
    }
    out << text;
  } else {
    const auto& s = fit.structure;
    out << "tau_hat " << s.tau_hat << "  k_hat " << s.k_hat << "  s_hat "
        << (s.s_hat ? std::to_string(*s.s_hat) : std::string("none")) << '\n';
    out << "knots";
    for (const auto k : s.knots) out << ' ' << k;
    out << "\nobjective " << fmt(fit.objective, "%.6e") << '\n';
    out << tsv.str();
  }
  return kOk;
}

// --- simulate -------------------------------------------------------------

int cmd_simulate(const Options& o, std::ostream& out) {
  if (o.n_species < 1) throw InputError("--n must be >= 1");
  const auto truth = make_truth(parse_truth_kind(o.truth), o.nu);
  SamplingPath path = SamplingPath::direct;
  if (o.sampling == "two_stage") {
    path = SamplingPath::two_stage;
  } else if (o.sampling != "direct") {
    throw InputError("--sampling must be direct or two_stage");
  }
  const auto table = simulate_counts(truth, o.n_species, resolve_seed(o), path);
  if (!o.out_dir.empty()) {
    fs::create_directories(o.out_dir);
    write_frequency_file(fs::path(o.out_dir) / "sample.freq", table);
  } else {
    write_frequency_table(out, table);
  }
  return kOk;
}

// --- study ----------------------------------------------------------------

int cmd_study(const Options& o, std::ostream& out, std::ostream& err) {
  if (o.scale && !o.input.empty()) {
    throw InputError("--scale and a config file are mutually exclusive");
  }
  if (o.scale && *o.scale != "desk" && *o.scale != "paper") {
    throw InputError("--scale must be desk or paper");
  }
  StudyConfig config;
  if (!o.input.empty()) {
    config = read_study_config(o.input);
  } else if (o.scale == "paper") {
    config = StudyConfig::paper_scale();
  }
  if (o.seed || std::getenv("CVXRICH_SEED")) config.seed = resolve_seed(o);
  if (o.workers > 0) config.workers = o.workers;
  config.validate();

  StudyRunOptions run;
  if (!o.out_dir.empty()) run.out_dir = fs::path(o.out_dir);
  const auto start = std::chrono::steady_clock::now();
  run.on_cell = [&](const CellResult& c, std::size_t index, std::size_t total) {
    const double secs = std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - start)
                            .count();
    err << "cell " << index + 1 << "/" << total << "  nu " << c.nu << "  N "
        << c.n << "  " << fmt(secs, "%.1f") << "s\n";
  };
  const auto report = run_study(config, run);
  if (!run.out_dir) write_cells_csv(out, report);
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  Options o;
  CLI::App app{"Species richness under a convex abundance distribution"};
  app.name("cvxrich");
  app.require_subcommand(1);

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--seed", o.seed, "Master seed (falls back to CVXRICH_SEED)");
    sub->add_option("--stream", o.stream, "Stream id under the master seed");
    sub->add_option("--output", o.output, "Output format")
        ->check(CLI::IsMember({"text", "json", "csv"}));
    sub->add_option("--out-dir", o.out_dir, "Directory for output files");
  };

  auto* est = app.add_subcommand("estimate", "Estimate N from a frequency file");
  est->add_option("input", o.input, "Frequency file")->required();
  est->add_option("--method", o.method, "Estimator")
      ->check(CLI::IsMember({"empirical", "convex", "chao84", "all", "auto"}));
  est->add_option("--ci", o.ci, "Confidence interval")
      ->check(CLI::IsMember({"empirical", "plugin", "bootstrap", "all", "none", "auto"}));
  est->add_option("--alpha", o.alpha, "One minus the confidence level");
  est->add_option("--n-sims", o.n_sims, "Plug-in simulations")->check(CLI::PositiveNumber);
  est->add_option("--n-boot", o.n_boot, "Bootstrap replicates")->check(CLI::PositiveNumber);
  est->add_option("--knot-tol", o.knot_tol, "Knot detection tolerance")
      ->check(CLI::PositiveNumber);
  est->add_flag("-v,--verbose", o.verbose, "Also print real-valued bounds");
  add_common(est);

  auto* proj = app.add_subcommand("project", "Convex least-squares fit of the empirical pmf");
  proj->add_option("input", o.input, "Frequency file")->required();
  proj->add_option("--knot-tol", o.knot_tol, "Knot detection tolerance")
      ->check(CLI::PositiveNumber);
  add_common(proj);

  auto* sim = app.add_subcommand("simulate", "Draw a frequency table from a study truth");
  sim->add_option("--truth", o.truth, "gamma_poisson_threshold or perturbed");
  sim->add_option("--nu", o.nu, "Gamma-Poisson shape");
  sim->add_option("--n", o.n_species, "Number of species N");
  sim->add_option("--sampling", o.sampling, "direct or two_stage");
  add_common(sim);

  auto* study = app.add_subcommand("study", "Monte Carlo study");
  study->add_option("config", o.input, "Key-value config file");
  study->add_option("--scale", o.scale, "desk or paper (without a config file)");
  study->add_option("--workers", o.workers, "Worker threads (0 = all cores)");
  add_common(study);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(std::move(reversed));
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      for (auto* sub : app.get_subcommands()) out << sub->help();
      return kOk;
    }
    err << "error: " << e.what() << '\n';
    return kInputError;
  }

  try {
    if (est->parsed()) return cmd_estimate(o, out);
    if (proj->parsed()) return cmd_project(o, out);
    if (sim->parsed()) return cmd_simulate(o, out);
    return cmd_study(o, out, err);
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kNumericalError;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  }
}

}  // namespace cvxrich::cli
