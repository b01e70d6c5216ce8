#include "cvxrich/confidence.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <random>
#include <string>

#include "cvxrich/convex_projection.hpp"
#include "cvxrich/errors.hpp"
#include "cvxrich/sampling.hpp"

namespace cvxrich {

namespace {

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw InputError("alpha must lie in (0, 1)");
  }
}

void check_count(int n, const char* what) {
  if (n < 1) throw InputError(std::string(what) + " must be >= 1");
}

void set_bounds(IntervalReport& r, double lower, double upper) {
  r.lower = lower;
  r.upper = upper;
  r.lower_int = static_cast<std::int64_t>(std::floor(lower));
  r.upper_int = static_cast<std::int64_t>(std::ceil(upper));
}

const Estimate& require_convex(const Estimate& e) {
  if (e.method != EstimatorMethod::convex || !e.fit) {
    throw InputError("interval requires a convex estimate with its fit");
  }
  return e;
}

// Interval N - sqrt(D) * q_hi, N - sqrt(D) * q_lo from sorted pivots.
void invert_pivots(IntervalReport& r, std::vector<double>& pivots,
                   double alpha, double sqrt_d) {
  std::sort(pivots.begin(), pivots.end());
  const double lo = nearest_rank_quantile(pivots, alpha / 2.0);
  const double hi = nearest_rank_quantile(pivots, 1.0 - alpha / 2.0);
  r.quantiles = std::make_pair(lo, hi);
  set_bounds(r, r.n_hat_real - sqrt_d * hi, r.n_hat_real - sqrt_d * lo);
}

}  // namespace

std::string_view to_string(IntervalMethod m) {
  switch (m) {
    case IntervalMethod::empirical: return "empirical";
    case IntervalMethod::plugin: return "plugin";
    case IntervalMethod::bootstrap: return "bootstrap";
  }
  return "unknown";
}

IntervalMethod parse_interval_method(std::string_view s) {
  if (s == "empirical") return IntervalMethod::empirical;
  if (s == "plugin") return IntervalMethod::plugin;
  if (s == "bootstrap") return IntervalMethod::bootstrap;
  throw InputError("unknown interval method '" + std::string(s) + "'");
}

double normal_quantile(double p) {
  return boost::math::quantile(boost::math::normal(), p);
}

double nearest_rank_quantile(std::span<const double> sorted, double beta) {
  if (sorted.empty()) throw InputError("quantile of an empty sample");
  const auto n = static_cast<double>(sorted.size());
  // The epsilon keeps beta * n = 25.000000000000004 at rank 25.
  auto rank = static_cast<std::size_t>(std::ceil(beta * n - 1e-9));
  rank = std::clamp<std::size_t>(rank, 1, sorted.size());
  return sorted[rank - 1];
}

IntervalReport ci_empirical(const FrequencyTable& t, double alpha) {
  check_alpha(alpha);
  const auto e = estimate_empirical(t);
  IntervalReport r;
  r.method = IntervalMethod::empirical;
  r.level = 1.0 - alpha;
  r.n_hat_real = e.n_hat_real;
  const double half = normal_quantile(1.0 - alpha / 2.0) *
                      std::sqrt(6.0 * static_cast<double>(t.count(1)));
  if (t.count(1) == 0) {
    r.warnings.emplace_back(
        "no singletons: variance estimate is zero, interval is degenerate");
  }
  set_bounds(r, e.n_hat_real - half, e.n_hat_real + half);
  return r;
}

LimitLawSpec make_limit_law(const ConvexFit& fit, double theta) {
  LimitLawSpec spec;
  spec.k = fit.structure.k_hat;
  spec.free_points = fit.structure.free_points;
  spec.gamma.assign(spec.k * spec.k, 0.0);
  for (std::size_t row = 0; row < spec.k; ++row) {
    const double pr = fit.phat[row + 1];
    for (std::size_t col = 0; col < spec.k; ++col) {
      const double pc = fit.phat[col + 1];
      spec.gamma[row * spec.k + col] = row == col ? pr * (1.0 - pr) : -pr * pc;
    }
  }
  spec.t_var = theta * (theta - 1.0);
  return spec;
}

std::vector<double> simulate_pivots(const LimitLawSpec& spec, int n,
                                    const SeedSpec& seed) {
  check_count(n, "number of simulations");
  if (spec.t_var < 0.0) throw NumericalError("negative variance for T");
  const auto k = static_cast<Eigen::Index>(spec.k);
  const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                       Eigen::RowMajor>>
      gamma(spec.gamma.data(), k, k);
  // Gamma is singular whenever phat vanishes inside 1..k; floor negative
  // eigenvalues instead of relying on a Cholesky factor.
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gamma);
  if (eig.info() != Eigen::Success) {
    throw NumericalError("eigendecomposition of the covariance failed");
  }
  const Eigen::MatrixXd factor =
      eig.eigenvectors() *
      eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();

  const RestrictedCone cone(spec.k, spec.free_points);
  const double t_sd = std::sqrt(spec.t_var);
  auto engine = make_engine(seed);
  std::normal_distribution<double> gauss;
  Eigen::VectorXd z(k);
  std::vector<double> w(spec.k);
  std::vector<double> pivots;
  pivots.reserve(static_cast<std::size_t>(n));
  for (int s = 0; s < n; ++s) {
    for (Eigen::Index i = 0; i < k; ++i) z(i) = gauss(engine);
    const Eigen::VectorXd draw = factor * z;
    for (Eigen::Index i = 0; i < k; ++i) w[static_cast<std::size_t>(i)] = draw(i);
    const auto phi = project_restricted(w, cone);
    pivots.push_back(2.0 * phi[0] - phi[1] + t_sd * gauss(engine));
  }
  return pivots;
}

IntervalReport ci_plugin(const FrequencyTable& t, double alpha, int n_sims,
                         const SeedSpec& seed,
                         const ConvexLseOptions& options) {
  check_alpha(alpha);
  return ci_plugin(estimate_convex(t, options), alpha, n_sims, seed);
}

IntervalReport ci_plugin(const Estimate& convex, double alpha, int n_sims,
                         const SeedSpec& seed) {
  check_alpha(alpha);
  check_count(n_sims, "n_sims");
  const auto& e = require_convex(convex);
  IntervalReport r;
  r.method = IntervalMethod::plugin;
  r.level = 1.0 - alpha;
  r.n_hat_real = e.n_hat_real;
  r.n_sims = n_sims;
  r.seed = seed;

  auto pivots = simulate_pivots(make_limit_law(*e.fit, e.theta_hat), n_sims, seed);
  invert_pivots(r, pivots, alpha,
                std::sqrt(static_cast<double>(e.observed)));
  return r;
}

IntervalReport ci_bootstrap(const FrequencyTable& t, double alpha, int n_boot,
                            const SeedSpec& seed,
                            const ConvexLseOptions& options) {
  check_alpha(alpha);
  return ci_bootstrap(estimate_convex(t, options), alpha, n_boot, seed, options);
}

IntervalReport ci_bootstrap(const Estimate& convex, double alpha, int n_boot,
                            const SeedSpec& seed,
                            const ConvexLseOptions& options) {
  check_alpha(alpha);
  check_count(n_boot, "n_boot");
  const auto& e = require_convex(convex);
  if (e.n_hat < 1) throw InputError("bootstrap requires N_hat >= 1");
  IntervalReport r;
  r.method = IntervalMethod::bootstrap;
  r.level = 1.0 - alpha;
  r.n_hat_real = e.n_hat_real;
  r.n_sims = n_boot;
  r.seed = seed;

  const DiscreteSampler sampler(e.fit->phat);
  const double detect = 1.0 / e.theta_hat;
  std::vector<double> pivots;
  pivots.reserve(static_cast<std::size_t>(n_boot));
  for (int b = 0; b < n_boot; ++b) {
    auto engine = make_engine(seed.child(static_cast<std::uint64_t>(b)));
    std::binomial_distribution<std::int64_t> observed(e.n_hat, detect);
    const auto d_star = observed(engine);
    if (d_star == 0) {
      ++r.dropped;
      continue;
    }
    const auto table = sample_truncated(sampler, d_star, engine);
    const auto boot = estimate_convex(table, options);
    pivots.push_back((boot.n_hat_real - e.n_hat_real) /
                     std::sqrt(static_cast<double>(d_star)));
  }
  if (r.dropped > 0) {
    r.warnings.push_back(std::to_string(r.dropped) +
                         " bootstrap replicates had D* = 0 and were dropped");
  }
  if (pivots.empty()) {
    throw NumericalError("every bootstrap replicate had D* = 0");
  }
  r.unreliable = r.dropped * 100 > n_boot;
  invert_pivots(r, pivots, alpha,
                std::sqrt(static_cast<double>(e.observed)));
  return r;
}

}  // namespace cvxrich
