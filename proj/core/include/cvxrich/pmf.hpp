#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <vector>

namespace cvxrich {

inline constexpr double kPmfSumTolerance = 1e-12;
inline constexpr double kConvexityTolerance = 1e-9;
inline constexpr double kDefaultTailCutoff = 1e-12;

/// Probability mass function on {0, 1, ..., support_max()}.
///
/// Trailing zeros are trimmed on construction, so size() == support_max()+1.
/// Zero-truncated distributions use the same type with probs()[0] == 0.
class Pmf {
 public:
  /// Validates nonnegativity and |sum - 1| <= sum_tolerance.
  explicit Pmf(std::vector<double> probs,
               double sum_tolerance = kPmfSumTolerance);

  static Pmf dirac(std::size_t at);

  std::span<const double> probs() const { return probs_; }
  std::size_t size() const { return probs_.size(); }
  std::size_t support_max() const { return probs_.size() - 1; }

  /// Mass at i; zero beyond the support.
  double operator[](std::size_t i) const {
    return i < probs_.size() ? probs_[i] : 0.0;
  }

  /// p_{i-1} + p_{i+1} - 2 p_i, defined for i >= 1.
  double second_difference(std::size_t i) const;

  friend bool operator==(const Pmf&, const Pmf&) = default;

 private:
  std::vector<double> probs_;
};

/// Weights pi_j on triangular components T_j, j >= 1.
class TriangularMixture {
 public:
  explicit TriangularMixture(std::map<std::size_t, double> weights);

  const std::map<std::size_t, double>& weights() const { return weights_; }
  double weight(std::size_t j) const;
  std::size_t max_component() const { return weights_.rbegin()->first; }

 private:
  std::map<std::size_t, double> weights_;
};

struct GammaPoissonParams {
  double nu;
  double mu;

  GammaPoissonParams(double nu, double mu);

  /// Parameters with 1 - mu = convexity_threshold(nu); requires nu > 1.
  static GammaPoissonParams at_threshold(double nu);
};

/// T_j on {0, ..., length-1}: 2(j-i)/(j(j+1)) for i < j, zero after.
Pmf triangular_pmf(std::size_t j, std::size_t length);

/// Unique triangular-mixture weights of a convex pmf, renormalized to sum 1.
/// Throws InputError naming the first index whose second difference is
/// below -tol.
TriangularMixture mixture_weights(const Pmf& p, double tol = kConvexityTolerance);

Pmf from_mixture(const TriangularMixture& m, std::size_t length);

bool is_convex(const Pmf& p, double tol = kConvexityTolerance);

/// Convex with no weight on the Dirac-at-zero component T_1.
bool is_convex_abundance(const Pmf& p, double tol = kConvexityTolerance);

/// Gamma-Poisson (negative binomial) pmf, truncated once the remaining tail
/// mass drops below tail_cutoff; the remainder is folded into the last entry.
Pmf gamma_poisson(const GammaPoissonParams& params,
                  double tail_cutoff = kDefaultTailCutoff);

/// Largest 1 - mu for which the Gamma-Poisson pmf is a convex abundance
/// distribution: (2 nu - sqrt(2 nu (nu - 1))) / (nu (nu + 1)), nu >= 1.
double convexity_threshold(double nu);

/// p_j / (1 - p_0) for j >= 1; entry 0 is zero.
Pmf truncate_zero(const Pmf& p);

/// q_0 = (p_0 + p_1) / 2 and q_j = p_j (1 - q_0) / (1 - p_0). Shares its
/// zero-truncated law with p.
Pmf robustness_perturb(const Pmf& p);

}  // namespace cvxrich
