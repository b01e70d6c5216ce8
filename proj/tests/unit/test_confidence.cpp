#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>

#include "cvxrich/confidence.hpp"
#include "cvxrich/errors.hpp"
#include "cvxrich/frequency_table.hpp"
#include "cvxrich/serialize.hpp"
#include "oracles.hpp"

using namespace cvxrich;

namespace {

FrequencyTable fixture(const char* name) {
  return read_frequency_file(std::filesystem::path(CVXRICH_DATA_DIR) / name);
}

// Nearest-rank quantile, written out separately from the library's.
double rank_quantile(std::vector<double> v, double beta) {
  std::sort(v.begin(), v.end());
  const auto n = static_cast<double>(v.size());
  auto rank = static_cast<std::size_t>(std::ceil(beta * n - 1e-9));
  rank = std::clamp<std::size_t>(rank, 1, v.size());
  return v[rank - 1];
}

}  // namespace

TEST_CASE("normal quantile") {
  CHECK(normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-14));
  CHECK(normal_quantile(0.5) == doctest::Approx(0.0));
}

TEST_CASE("nearest-rank quantile") {
  const std::vector<double> v = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  CHECK(nearest_rank_quantile(v, 0.025) == 1);
  CHECK(nearest_rank_quantile(v, 0.5) == 5);
  CHECK(nearest_rank_quantile(v, 0.975) == 10);
  CHECK(nearest_rank_quantile(v, 0.3) == 3);
}

TEST_CASE("empirical interval") {
  const auto b = ci_empirical(fixture("butterfly.freq"), 0.05);
  CHECK(std::abs(b.lower_int - 730) <= 1);
  CHECK(std::abs(b.upper_int - 834) <= 1);
  CHECK(b.lower == doctest::Approx(782.0 - 1.959963984540054 * std::sqrt(708.0)));
  CHECK(b.n_sims == 0);

  const auto bird = ci_empirical(fixture("bird.freq"), 0.05);
  CHECK(bird.lower_int == 66);
  CHECK(bird.upper_int == 98);

  for (const double alpha : {0.01, 0.05, 0.2}) {
    const auto r = ci_empirical(fixture("tomato.freq"), alpha);
    CHECK((r.lower + r.upper) / 2.0 == doctest::Approx(r.n_hat_real));
    CHECK(r.upper - r.lower ==
          doctest::Approx(2.0 * normal_quantile(1.0 - alpha / 2.0) * std::sqrt(6.0 * 1434.0)));
  }

  const auto flat = ci_empirical(FrequencyTable({{2, 5}, {3, 5}}), 0.05);
  CHECK(flat.lower == flat.upper);
  CHECK(flat.warnings.size() == 1);
  CHECK_THROWS_AS(ci_empirical(fixture("bird.freq"), 1.5), InputError);
}

TEST_CASE("limit law covariance") {
  const auto e = estimate_convex(fixture("butterfly.freq"));
  const auto spec = make_limit_law(*e.fit, e.theta_hat);
  CHECK(spec.k == 2);
  const double p1 = e.fit->phat[1];
  const double p2 = e.fit->phat[2];
  CHECK(spec.gamma_at(0, 0) == doctest::Approx(p1 * (1 - p1)));
  CHECK(spec.gamma_at(0, 1) == doctest::Approx(-p1 * p2));
  CHECK(spec.gamma_at(1, 0) == spec.gamma_at(0, 1));
  CHECK(spec.t_var == doctest::Approx(e.theta_hat * (e.theta_hat - 1)));
}

TEST_CASE("k = 2 pivots follow the Gaussian limit") {
  const auto e = estimate_convex(fixture("butterfly.freq"));
  REQUIRE(e.fit->structure.k_hat == 2);
  const auto pivots = simulate_pivots(make_limit_law(*e.fit, e.theta_hat), 10000, {5, 0});
  const double sd = std::sqrt(6.0 * e.fit->phat[1]);
  CHECK(oracle::ks_distance(pivots, [&](double x) { return oracle::normal_cdf(x, sd); }) < 0.02);

  const auto r = ci_plugin(e, 0.05, 10000, {5, 0});
  REQUIRE(r.quantiles);
  CHECK(r.quantiles->first == doctest::Approx(-1.96 * sd).epsilon(0.05));
  CHECK(r.quantiles->second == doctest::Approx(1.96 * sd).epsilon(0.05));
}

TEST_CASE("dirac fit: pivot reduces to T") {
  const FrequencyTable t({{1, 1000}});
  const auto e = estimate_convex(t);
  REQUIRE(e.fit->structure.k_hat == 2);
  const auto pivots = simulate_pivots(make_limit_law(*e.fit, e.theta_hat), 20000, {1, 1});

  // Brute-force draws of N(0, theta (theta - 1)) = N(0, 6).
  std::mt19937_64 rng(99);
  std::normal_distribution<double> z(0.0, std::sqrt(6.0));
  std::vector<double> direct(20000);
  for (auto& x : direct) x = z(rng);
  CHECK(oracle::ks_two_sample(pivots, direct) < 0.03);

  const double half = 1.959963984540054 * std::sqrt(6.0);
  CHECK(rank_quantile(pivots, 0.975) == doctest::Approx(half).epsilon(0.05));
  CHECK(rank_quantile(pivots, 0.025) == doctest::Approx(-half).epsilon(0.05));
}

TEST_CASE("plug-in interval on the bird fixture") {
  const auto r = ci_plugin(fixture("bird.freq"), 0.05, 1000, {7, 0});
  CHECK(std::abs(r.lower_int - 71) <= 3);
  CHECK(std::abs(r.upper_int - 96) <= 3);
  CHECK(r.n_sims == 1000);
  CHECK(r.seed == SeedSpec{7, 0});
}

TEST_CASE("intervals nest as alpha shrinks") {
  const auto t = fixture("bird.freq");
  const auto e = estimate_convex(t);
  double lo = -1e18;
  double hi = 1e18;
  for (const double alpha : {0.01, 0.05, 0.1, 0.2, 0.4}) {
    const auto r = ci_plugin(e, alpha, 2000, {3, 0});
    CHECK(r.lower >= lo);
    CHECK(r.upper <= hi);
    lo = r.lower;
    hi = r.upper;
    const auto b = ci_bootstrap(e, alpha, 200, {3, 0});
    CHECK(b.lower <= b.upper);
  }
}

TEST_CASE("interval reports are deterministic in the seed") {
  const auto t = fixture("bird.freq");
  const auto e = estimate_convex(t);
  const nlohmann::json a = ci_plugin(e, 0.05, 500, {11, 4});
  const nlohmann::json b = ci_plugin(e, 0.05, 500, {11, 4});
  CHECK(a.dump() == b.dump());
  const nlohmann::json c = ci_bootstrap(e, 0.05, 100, {11, 4});
  const nlohmann::json d = ci_bootstrap(e, 0.05, 100, {11, 4});
  CHECK(c.dump() == d.dump());
  const nlohmann::json other = ci_plugin(e, 0.05, 500, {11, 5});
  CHECK(a.dump() != other.dump());
}

TEST_CASE("bootstrap with a dirac fit matches direct binomial simulation") {
  const FrequencyTable t({{1, 300}});
  const auto e = estimate_convex(t);
  const auto r = ci_bootstrap(e, 0.1, 4000, {8, 0});
  REQUIRE(r.quantiles);

  // Every replicate has theta* = 3, so pivot* = (3 D* - 900) / sqrt(D*).
  std::mt19937_64 rng(1234);
  std::binomial_distribution<int> draw(900, 1.0 / 3.0);
  std::vector<double> direct(40000);
  for (auto& x : direct) {
    const double d = draw(rng);
    x = (3.0 * d - 900.0) / std::sqrt(d);
  }
  CHECK(r.quantiles->first == doctest::Approx(rank_quantile(direct, 0.05)).epsilon(0.1));
  CHECK(r.quantiles->second == doctest::Approx(rank_quantile(direct, 0.95)).epsilon(0.1));
  CHECK(r.dropped == 0);
  CHECK_FALSE(r.unreliable);
}

TEST_CASE("bootstrap on all singletons contains 3D") {
  const auto r = ci_bootstrap(FrequencyTable({{1, 1000}}), 0.05, 300, {2, 0});
  CHECK(r.lower <= 3000.0);
  CHECK(r.upper >= 3000.0);
}

TEST_CASE("bootstrap drops empty replicates and flags them") {
  // N_hat = 3 with detection 1/3: D* = 0 about 30% of the time.
  const auto r = ci_bootstrap(FrequencyTable({{1, 1}}), 0.05, 200, {4, 0});
  CHECK(r.dropped > 0);
  CHECK(r.unreliable);
  CHECK_FALSE(r.warnings.empty());
}

TEST_CASE("bootstrap and plug-in agree on butterfly") {
  // Both target the same limit law. In this sample the bootstrap is a few
  // units narrower on the upper side, so the upper bound gets more room.
  const auto e = estimate_convex(fixture("butterfly.freq"));
  const auto p = ci_plugin(e, 0.05, 1000, {1, 0});
  const auto b = ci_bootstrap(e, 0.05, 1000, {1, 0});
  CHECK(std::abs(b.lower - p.lower) <= 5.0);
  CHECK(std::abs(b.upper - p.upper) <= 10.0);
}
