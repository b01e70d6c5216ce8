#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "cvxrich/errors.hpp"
#include "cvxrich/pmf.hpp"
#include "oracles.hpp"

using namespace cvxrich;

TEST_CASE("triangular pmf entries") {
  const auto t1 = triangular_pmf(1, 1);
  CHECK(t1.size() == 1);
  CHECK(t1[0] == 1.0);

  const auto t2 = triangular_pmf(2, 2);
  CHECK(t2[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(t2[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));

  const auto t4 = triangular_pmf(4, 6);
  const double expected[] = {0.4, 0.3, 0.2, 0.1};
  double sum = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(t4[i] == doctest::Approx(expected[i]).epsilon(1e-15));
    sum += t4[i];
  }
  CHECK(t4[4] == 0.0);
  CHECK(t4.support_max() == 3);
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-15));

  CHECK_THROWS_AS(triangular_pmf(0, 3), InputError);
}

TEST_CASE("pmf validation") {
  CHECK_THROWS_AS(Pmf({0.5, -0.1, 0.6}), InputError);
  CHECK_THROWS_AS(Pmf({0.5, 0.4}), InputError);
  CHECK_THROWS_AS(Pmf({0.5, NAN}), InputError);
  const Pmf p({0.25, 0.75, 0.0, 0.0});
  CHECK(p.support_max() == 1);
  CHECK(p[7] == 0.0);
  CHECK(Pmf::dirac(3).support_max() == 3);
}

TEST_CASE("mixture weights of pure and mixed components") {
  const auto w3 = mixture_weights(triangular_pmf(3, 5));
  REQUIRE(w3.weights().size() == 1);
  CHECK(w3.weight(3) == doctest::Approx(1.0).epsilon(1e-14));

  std::vector<double> mix(6, 0.0);
  const auto t2 = triangular_pmf(2, 6);
  const auto t5 = triangular_pmf(5, 6);
  for (std::size_t i = 0; i < 6; ++i) mix[i] = 0.3 * t2[i] + 0.7 * t5[i];
  const auto w = mixture_weights(Pmf(mix));
  CHECK(w.weight(2) == doctest::Approx(0.3).epsilon(1e-13));
  CHECK(w.weight(5) == doctest::Approx(0.7).epsilon(1e-13));
  CHECK(w.weight(1) == 0.0);
}

TEST_CASE("mixture weights reject non-convex input naming the index") {
  const Pmf bumpy({0.2, 0.1, 0.4, 0.3});
  try {
    mixture_weights(bumpy);
    FAIL("expected an InputError");
  } catch (const InputError& e) {
    CHECK(std::string(e.what()).find("index 2") != std::string::npos);
  }
}

TEST_CASE("convexity and convex abundance") {
  CHECK(is_convex(triangular_pmf(4, 4)));
  CHECK(is_convex_abundance(triangular_pmf(4, 4)));
  // T_1 is convex but is all Dirac-at-zero weight.
  CHECK(is_convex(triangular_pmf(1, 3)));
  CHECK_FALSE(is_convex_abundance(triangular_pmf(1, 3)));
  CHECK_FALSE(is_convex(Pmf({0.2, 0.1, 0.4, 0.3})));
}

TEST_CASE("random mixtures round trip through from_mixture") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<std::size_t> comp(2, 20);
  std::uniform_real_distribution<double> u(0.05, 1.0);
  for (int rep = 0; rep < 50; ++rep) {
    std::map<std::size_t, double> w;
    double total = 0.0;
    const int n = 1 + rep % 5;
    for (int c = 0; c < n; ++c) {
      const double x = u(rng);
      w[comp(rng)] += x;
      total += x;
    }
    for (auto& [j, x] : w) x /= total;
    const TriangularMixture m(w);
    const auto p = from_mixture(m, 21);
    CHECK(is_convex_abundance(p));
    const auto back = mixture_weights(p);
    for (const auto& [j, x] : w) CHECK(std::abs(back.weight(j) - x) < 1e-12);
  }
}

TEST_CASE("gamma-poisson recurrence agrees with lgamma closed form") {
  for (const double nu : {0.5, 1.01, 1.3, 2.5, 4.0}) {
    for (const double mu : {0.2, 0.5, 0.9}) {
      const auto p = gamma_poisson(GammaPoissonParams(nu, mu));
      double sum = 0.0;
      for (std::size_t j = 0; j < p.size(); ++j) sum += p[j];
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
      // The last entry carries the folded tail, so compare all but it.
      for (std::size_t j = 0; j + 1 < p.size(); ++j) {
        const double ref = oracle::gamma_poisson_mass(nu, mu, j);
        CHECK(std::abs(p[j] - ref) <= 1e-12 * std::max(1.0, ref));
      }
    }
  }
  CHECK_THROWS_AS(GammaPoissonParams(0.0, 0.5), InputError);
  CHECK_THROWS_AS(GammaPoissonParams(1.5, 1.0), InputError);
}

TEST_CASE("convexity threshold separates convex abundance") {
  // nu = 1 gives mu = 0, outside the family, so the grid starts just above.
  for (int i = 1; i <= 100; ++i) {
    const double nu = 1.0 + 3.0 * i / 100.0;
    const double r = convexity_threshold(nu);
    CHECK(is_convex_abundance(gamma_poisson(GammaPoissonParams(nu, 1.0 - r)), 1e-9));
    const double above = std::min(1.05 * r, 1.0 - 1e-9);
    CHECK_FALSE(is_convex_abundance(gamma_poisson(GammaPoissonParams(nu, 1.0 - above)), 1e-9));
  }
  CHECK(convexity_threshold(1.0) == doctest::Approx(1.0));
  CHECK(convexity_threshold(2.0) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK_THROWS_AS(convexity_threshold(0.9), InputError);
}

TEST_CASE("from_mixture hand expansions") {
  CHECK(from_mixture(TriangularMixture({{1, 1.0}}), 3) == Pmf::dirac(0));
  const auto p = from_mixture(TriangularMixture({{2, 0.4}, {3, 0.6}}), 4);
  CHECK(p[0] == doctest::Approx(0.4 * 2.0 / 3.0 + 0.6 * 0.5).epsilon(1e-15));
  CHECK(p[1] == doctest::Approx(0.4 / 3.0 + 0.6 / 3.0).epsilon(1e-15));
  CHECK(p[2] == doctest::Approx(0.6 / 6.0).epsilon(1e-15));
  CHECK_THROWS_AS(from_mixture(TriangularMixture({{5, 1.0}}), 4), InputError);
}

TEST_CASE("gamma-poisson special cases") {
  const auto geo = gamma_poisson(GammaPoissonParams(1.0, 0.5));
  for (std::size_t j = 0; j + 1 < geo.size(); ++j) {
    CHECK(geo[j] == doctest::Approx(std::pow(0.5, j + 1.0)).epsilon(1e-13));
  }
  CHECK(std::abs(gamma_poisson(GammaPoissonParams::at_threshold(1.5))[0] - 0.382) < 1e-3);
  CHECK(std::abs(gamma_poisson(GammaPoissonParams::at_threshold(1.01))[0] - 0.073) < 1e-3);
  CHECK_THROWS_AS(gamma_poisson(GammaPoissonParams(1.5, 0.5), 1e-3), InputError);
}

TEST_CASE("second-difference and mixture-weight convexity tests agree") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int convex = 0;
  for (int rep = 0; rep < 1000; ++rep) {
    // Half the draws are sorted decreasing so both outcomes occur.
    std::vector<double> v(2 + rep % 7);
    double total = 0.0;
    for (auto& x : v) total += x = u(rng);
    for (auto& x : v) x /= total;
    if (rep % 2) std::sort(v.rbegin(), v.rend());
    const Pmf p(v, 1e-12);
    bool weights_ok = true;
    try {
      mixture_weights(p);
    } catch (const InputError&) {
      weights_ok = false;
    }
    CHECK(weights_ok == is_convex(p));
    convex += weights_ok;
  }
  CHECK(convex > 0);
  CHECK(convex < 1000);
}

TEST_CASE("threshold gamma-poisson p0 matches the published grid") {
  const double nus[] = {1.01, 1.05, 1.1, 1.3, 1.5, 1.75};
  const double p0s[] = {0.073, 0.16, 0.218, 0.33, 0.382, 0.42};
  for (int i = 0; i < 6; ++i) {
    const auto p = gamma_poisson(GammaPoissonParams::at_threshold(nus[i]));
    CHECK(std::abs(p[0] - p0s[i]) < 1e-2);
  }
}

TEST_CASE("zero truncation") {
  const auto p = gamma_poisson(GammaPoissonParams(1.5, 0.4));
  const auto t = truncate_zero(p);
  CHECK(t[0] == 0.0);
  for (std::size_t j = 1; j < p.size(); ++j) {
    CHECK(std::abs(t[j] - p[j] / (1.0 - p[0])) < 1e-14);
  }
  CHECK_THROWS_AS(truncate_zero(Pmf::dirac(0)), InputError);
  const auto half = truncate_zero(Pmf({0.5, 0.25, 0.25}));
  CHECK(half[1] == 0.5);
  CHECK(half[2] == 0.5);
  const Pmf no_zero({0.0, 0.3, 0.7});
  CHECK(truncate_zero(no_zero) == no_zero);
}

TEST_CASE("perturbation fixed point") {
  const Pmf p({0.3, 0.3, 0.4});
  const auto q = robustness_perturb(p);
  for (std::size_t j = 0; j < 3; ++j) CHECK(q[j] == doctest::Approx(p[j]).epsilon(1e-15));
}

TEST_CASE("perturbation keeps the truncated law") {
  for (const double nu : {1.01, 1.1, 1.75, 3.0}) {
    const auto p = gamma_poisson(GammaPoissonParams::at_threshold(nu));
    const auto q = robustness_perturb(p);
    CHECK(q[0] == doctest::Approx((p[0] + p[1]) / 2.0).epsilon(1e-15));
    const auto tp = truncate_zero(p);
    const auto tq = truncate_zero(q);
    for (std::size_t j = 0; j < p.size(); ++j) CHECK(std::abs(tp[j] - tq[j]) < 1e-14);
  }
  const auto q101 = robustness_perturb(gamma_poisson(GammaPoissonParams::at_threshold(1.01)));
  const auto q175 = robustness_perturb(gamma_poisson(GammaPoissonParams::at_threshold(1.75)));
  CHECK(std::abs(q101[0] - 0.0707) < 5e-4);
  CHECK(std::abs(q175[0] - 0.354) < 5e-3);
}
