#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cvxrich/estimators.hpp"
#include "cvxrich/frequency_table.hpp"
#include "cvxrich/random.hpp"

namespace cvxrich {

enum class IntervalMethod { empirical, plugin, bootstrap };

std::string_view to_string(IntervalMethod m);
IntervalMethod parse_interval_method(std::string_view s);

inline constexpr int kDefaultSimulations = 1000;

struct IntervalReport {
  IntervalMethod method = IntervalMethod::empirical;
  double level = 0.95;
  double n_hat_real = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  /// Outward-rounded bounds: floor(lower), ceil(upper).
  std::int64_t lower_int = 0;
  std::int64_t upper_int = 0;
  int n_sims = 0;
  /// Simulated pivot quantiles at alpha/2 and 1 - alpha/2.
  std::optional<std::pair<double, double>> quantiles;
  std::optional<SeedSpec> seed;
  /// Bootstrap replicates discarded because D* = 0.
  int dropped = 0;
  bool unreliable = false;
  std::vector<std::string> warnings;

  double alpha() const { return 1.0 - level; }
};

/// Standard normal quantile.
double normal_quantile(double p);

/// Type-1 (nearest-rank) empirical quantile of an ascending sample.
double nearest_rank_quantile(std::span<const double> sorted, double beta);

/// N^f -/+ z_{1-alpha/2} sqrt(6 S_1). Degenerates to a point (with a
/// warning) when S_1 = 0.
IntervalReport ci_empirical(const FrequencyTable& t, double alpha);

/// Plug-in estimate of the limit law of (N - N_true) / sqrt(D):
/// 2 Phi_I(W)_1 - Phi_I(W)_2 + T with W ~ N(0, gamma), T ~ N(0, t_var).
struct LimitLawSpec {
  std::size_t k = 0;
  std::vector<std::size_t> free_points;
  /// Row-major k x k covariance: p_j (1 - p_j) on the diagonal, -p_j p_l off it.
  std::vector<double> gamma;
  double t_var = 0.0;

  double gamma_at(std::size_t row, std::size_t col) const {
    return gamma[row * k + col];
  }
};

LimitLawSpec make_limit_law(const ConvexFit& fit, double theta);

/// n independent draws of the pivot, in draw order.
std::vector<double> simulate_pivots(const LimitLawSpec& spec, int n,
                                    const SeedSpec& seed);

IntervalReport ci_plugin(const FrequencyTable& t, double alpha, int n_sims,
                         const SeedSpec& seed,
                         const ConvexLseOptions& options = {});

/// Same, reusing an existing convex estimate of t.
IntervalReport ci_plugin(const Estimate& convex, double alpha, int n_sims,
                         const SeedSpec& seed);

IntervalReport ci_bootstrap(const FrequencyTable& t, double alpha, int n_boot,
                            const SeedSpec& seed,
                            const ConvexLseOptions& options = {});

IntervalReport ci_bootstrap(const Estimate& convex, double alpha, int n_boot,
                            const SeedSpec& seed,
                            const ConvexLseOptions& options = {});

}  // namespace cvxrich
