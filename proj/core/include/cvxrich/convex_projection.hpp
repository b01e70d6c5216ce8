#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "cvxrich/pmf.hpp"

namespace cvxrich {

inline constexpr double kKktTolerance = 1e-10;
inline constexpr double kKnotTolerance = 1e-7;
inline constexpr double kDykstraTolerance = 1e-12;
inline constexpr long kDykstraMaxSweeps = 1'000'000;

/// Knot structure of a convex zero-truncated pmf.
///
/// A knot is an index i >= 2 with p_{i-1} + p_{i+1} - 2 p_i > tol; a
/// double knot is a knot i such that i + 1 is also a knot. The limit law of
/// the convex estimator lives on coordinates 1..k_hat with free points
/// `free_points` = {1, k_hat} together with every knot below k_hat.
struct KnotStructure {
  std::vector<std::size_t> knots;
  std::size_t tau_hat = 0;
  std::optional<std::size_t> s_hat;
  std::size_t k_hat = 0;
  std::vector<std::size_t> free_points;
};

KnotStructure detect_knots(const Pmf& phat, double tol = kKnotTolerance);

struct ConvexLseOptions {
  double kkt_tol = kKktTolerance;
  double knot_tol = kKnotTolerance;
  int max_iterations = 10'000;
};

/// Least-squares projection of an empirical zero-truncated pmf onto convex
/// sequences, together with its knot structure and optimality certificate.
struct ConvexFit {
  Pmf phat;
  KnotStructure structure;
  /// sum_j (phat_j - f_j)^2
  double objective = 0.0;
  /// min over candidate triangular directions T of <T, phat - f>.
  double min_directional_derivative = 0.0;
  int iterations = 0;
};

/// Convex least-squares estimator by support reduction over the triangular
/// generators with supports {1..m}. The candidate range starts at
/// m <= tau_f + 1 and widens until no generator past it is a descent
/// direction, since the fit's support can exceed the data's. Throws
/// NumericalError if the KKT certificate is not reached within
/// max_iterations.
ConvexFit convex_lse(const Pmf& f, const ConvexLseOptions& options = {});

/// Index set I of the restricted cone C^I in R^k: sequences convex at every
/// interior index outside I.
class RestrictedCone {
 public:
  RestrictedCone(std::size_t k, std::vector<std::size_t> free_points);

  std::size_t dimension() const { return k_; }
  const std::vector<std::size_t>& free_points() const { return free_points_; }

  /// 1-based interior indices i carrying q_{i-1} - 2 q_i + q_{i+1} >= 0.
  const std::vector<std::size_t>& constrained() const { return constrained_; }

 private:
  std::size_t k_;
  std::vector<std::size_t> free_points_;
  std::vector<std::size_t> constrained_;
};

struct DykstraOptions {
  double tol = kDykstraTolerance;
  long max_sweeps = kDykstraMaxSweeps;
};

/// Euclidean projection onto C^I by Dykstra's cyclic algorithm over the
/// second-difference half-spaces; stops when a full sweep moves the iterate
/// by at most tol in the sup norm.
std::vector<double> project_restricted(std::span<const double> t,
                                       const RestrictedCone& cone,
                                       const DykstraOptions& options = {});

}  // namespace cvxrich
