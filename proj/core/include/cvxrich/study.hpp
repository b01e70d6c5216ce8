#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cvxrich/confidence.hpp"
#include "cvxrich/estimators.hpp"
#include "cvxrich/pmf.hpp"
#include "cvxrich/random.hpp"
#include "cvxrich/sampling.hpp"

namespace cvxrich {

enum class TruthKind {
  /// Gamma-Poisson with 1 - mu = convexity_threshold(nu).
  gamma_poisson_threshold,
  /// robustness_perturb() of the threshold Gamma-Poisson.
  perturbed,
};

std::string_view to_string(TruthKind k);
TruthKind parse_truth_kind(std::string_view s);

Pmf make_truth(TruthKind kind, double nu);

struct StudyConfig {
  TruthKind truth = TruthKind::gamma_poisson_threshold;
  std::vector<double> nu_values{1.1};
  std::vector<std::int64_t> n_values{100, 800, 5000};
  double alpha = 0.05;
  int n_reps = 500;
  int n_sims = 500;
  int n_boot = 500;
  std::vector<EstimatorMethod> estimators{EstimatorMethod::empirical,
                                          EstimatorMethod::convex};
  std::vector<IntervalMethod> intervals{IntervalMethod::empirical,
                                        IntervalMethod::plugin};
  SeedSpec seed{};
  double knot_tol = kKnotTolerance;
  SamplingPath sampling = SamplingPath::direct;
  /// Worker threads; 0 picks the hardware concurrency. Never affects output.
  int workers = 0;

  /// n_reps = 500, inner simulations 500, N in {100, 800, 5000}.
  static StudyConfig desk_scale();
  /// The full published design: 1000 x 1000, nine values of N, six of nu.
  static StudyConfig paper_scale();

  void validate() const;
};

/// Plain-text "key = value" file; '#' starts a comment. Keys: truth, nu,
/// n, alpha, n_reps, n_sims, n_boot, estimators, intervals, seed, stream,
/// knot_tol, sampling, workers, scale (desk | paper, applied first).
/// Lists are comma separated.
StudyConfig parse_study_config(std::istream& in);
StudyConfig read_study_config(const std::filesystem::path& path);

/// Canonical key-value text; parse_study_config() reads it back unchanged.
/// The worker count is omitted because it never changes results.
std::string to_config_text(const StudyConfig& config);

struct EstimatorSummary {
  EstimatorMethod method = EstimatorMethod::empirical;
  int n_ok = 0;
  int failures = 0;
  double mean = 0.0;
  /// N - mean, the published sign convention.
  double bias = 0.0;
  /// sqrt(sum (N_s - mean)^2 / n_ok)
  double se = 0.0;
  /// sqrt(bias^2 + se^2)
  double ep = 0.0;
  double mean_theta = 0.0;
};

struct IntervalSummary {
  IntervalMethod method = IntervalMethod::empirical;
  int n_ok = 0;
  int failures = 0;
  /// Percent of replicates with N < lower bound.
  double left_miss = 0.0;
  /// Percent of replicates with N > upper bound.
  double right_miss = 0.0;
  /// Binomial standard error of a nominal alpha/2 tail at n_ok, in percent.
  double mc_se = 0.0;
  double mean_lower = 0.0;
  double mean_upper = 0.0;
  int unreliable = 0;
};

struct CellResult {
  TruthKind truth = TruthKind::gamma_poisson_threshold;
  double nu = 0.0;
  double p0 = 0.0;
  std::int64_t n = 0;
  int n_reps_done = 0;
  std::vector<EstimatorSummary> estimators;
  std::vector<IntervalSummary> intervals;

  const EstimatorSummary& estimator(EstimatorMethod m) const;
  const IntervalSummary& interval(IntervalMethod m) const;
};

/// Replicates of one (truth, N) cell. `cell_seed` keys every replicate
/// stream; results do not depend on config.workers.
CellResult run_cell(const Pmf& truth, std::int64_t n, const StudyConfig& config,
                    const SeedSpec& cell_seed);

struct StudyReport {
  StudyConfig config;
  std::vector<CellResult> cells;
};

struct StudyRunOptions {
  /// When set, outputs are written here atomically; completed cells are
  /// persisted under "<out_dir>.partial" so an interrupted run resumes.
  std::optional<std::filesystem::path> out_dir;
  std::function<void(const CellResult&, std::size_t index, std::size_t total)>
      on_cell;
};

StudyReport run_study(const StudyConfig& config,
                      const StudyRunOptions& options = {});

/// Writes cells.csv, cells.json and plotdata/*.tsv into dir.
void write_study_outputs(const StudyReport& report,
                         const std::filesystem::path& dir);

void write_cells_csv(std::ostream& out, const StudyReport& report);

/// Sum in a fixed binary-tree order.
double pairwise_sum(std::span<const double> values);

}  // namespace cvxrich
