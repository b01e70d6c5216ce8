#include "cvxrich/convex_projection.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "cvxrich/errors.hpp"

namespace cvxrich {

namespace {

// Triangular generator with support {1..m}, normalized to sum 1, at index i.
double generator(std::size_t m, std::size_t i) {
  if (i > m) return 0.0;
  return 2.0 * static_cast<double>(m + 1 - i) /
         (static_cast<double>(m) * static_cast<double>(m + 1));
}

// <g_m, r> for every m = 1..r.size(), via prefix sums of r_i and i r_i.
std::vector<double> directional_derivatives(const Eigen::VectorXd& residual) {
  const auto len = static_cast<std::size_t>(residual.size());
  std::vector<double> d(len);
  double sum = 0.0;
  double weighted = 0.0;
  for (std::size_t m = 1; m <= len; ++m) {
    const double r = residual(static_cast<Eigen::Index>(m - 1));
    sum += r;
    weighted += static_cast<double>(m) * r;
    const double scale =
        2.0 / (static_cast<double>(m) * static_cast<double>(m + 1));
    d[m - 1] = scale * (static_cast<double>(m + 1) * sum - weighted);
  }
  return d;
}

Eigen::MatrixXd basis(const std::vector<std::size_t>& active,
                      std::size_t len) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(len),
                                            static_cast<Eigen::Index>(active.size()));
  for (std::size_t c = 0; c < active.size(); ++c) {
    for (std::size_t i = 1; i <= active[c]; ++i) {
      a(static_cast<Eigen::Index>(i - 1), static_cast<Eigen::Index>(c)) =
          generator(active[c], i);
    }
  }
  return a;
}

}  // namespace

KnotStructure detect_knots(const Pmf& phat, double tol) {
  KnotStructure s;
  s.tau_hat = phat.support_max();
  for (std::size_t i = 2; i <= s.tau_hat + 1; ++i) {
    if (phat.second_difference(i) > tol) s.knots.push_back(i);
  }
  for (std::size_t n = 0; n + 1 < s.knots.size(); ++n) {
    if (s.knots[n + 1] == s.knots[n] + 1) {
      s.s_hat = s.knots[n];
      break;
    }
  }
  s.k_hat = s.tau_hat + 1;
  if (s.s_hat && *s.s_hat < s.k_hat) s.k_hat = *s.s_hat;

  s.free_points.push_back(1);
  for (const auto knot : s.knots) {
    if (knot < s.k_hat) s.free_points.push_back(knot);
  }
  if (s.free_points.back() != s.k_hat) s.free_points.push_back(s.k_hat);
  return s;
}

ConvexFit convex_lse(const Pmf& f, const ConvexLseOptions& options) {
  if (f[0] != 0.0) {
    throw InputError("convex_lse expects a zero-truncated pmf (f_0 = 0)");
  }
  // Generators may need support beyond tau_f + 1; the grid grows until the
  // certificate also holds for every generator past its end.
  std::size_t len = f.support_max() + 1;
  Eigen::VectorXd target = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(len));
  for (std::size_t i = 1; i <= f.support_max(); ++i) {
    target(static_cast<Eigen::Index>(i - 1)) = f[i];
  }

  std::vector<std::size_t> active;
  std::vector<double> coef;
  Eigen::VectorXd fitted = Eigen::VectorXd::Zero(target.size());
  int iterations = 0;
  double min_derivative = 0.0;

  for (;; ++iterations) {
    const Eigen::VectorXd residual = fitted - target;
    const auto d = directional_derivatives(residual);
    auto best = std::min_element(d.begin(), d.end());
    min_derivative = *best;
    std::size_t entering = static_cast<std::size_t>(best - d.begin()) + 1;

    if (min_derivative >= -options.kkt_tol) {
      // Past the grid the residual is zero, so <g_m, r> has the closed form
      // 2 ((m + 1) A - B) / (m (m + 1)) with A = sum r_i, B = sum i r_i.
      const double a_sum = residual.sum();
      double b_sum = 0.0;
      for (std::size_t i = 1; i <= len; ++i) {
        b_sum += static_cast<double>(i) * residual(static_cast<Eigen::Index>(i - 1));
      }
      double tail_min = 0.0;
      std::size_t tail_arg = 0;
      for (std::size_t m = len + 1; m <= 4 * len; ++m) {
        const double md = static_cast<double>(m);
        const double dm = 2.0 * ((md + 1.0) * a_sum - b_sum) / (md * (md + 1.0));
        if (dm < tail_min) {
          tail_min = dm;
          tail_arg = m;
        }
      }
      if (tail_min >= -options.kkt_tol && a_sum >= -options.kkt_tol) {
        // Wide generators have derivatives of order 1/m^2, so a loose
        // certificate can still leave a visible mass defect. Keep descending
        // while that happens and a new direction is available.
        const bool known =
            std::binary_search(active.begin(), active.end(), entering);
        if (std::abs(a_sum) <= 1e-13 || min_derivative >= 0.0 || known) break;
      } else {
        min_derivative = std::min(min_derivative, tail_min);
        const std::size_t grown = std::max(tail_arg, 2 * len);
        target.conservativeResize(static_cast<Eigen::Index>(grown));
        fitted.conservativeResize(static_cast<Eigen::Index>(grown));
        target.tail(static_cast<Eigen::Index>(grown - len)).setZero();
        fitted.tail(static_cast<Eigen::Index>(grown - len)).setZero();
        len = grown;
        entering = tail_arg != 0 ? tail_arg : len;
      }
    }
    if (iterations >= options.max_iterations) {
      std::ostringstream msg;
      msg << "support reduction did not converge after " << iterations
          << " iterations (min directional derivative " << min_derivative
          << ")";
      throw NumericalError(msg.str());
    }

    const auto pos = std::lower_bound(active.begin(), active.end(), entering);
    coef.insert(coef.begin() + (pos - active.begin()), 0.0);
    active.insert(pos, entering);

    for (;;) {
      const Eigen::MatrixXd a = basis(active, len);
      const Eigen::VectorXd trial = a.colPivHouseholderQr().solve(target);

      double step = 1.0;
      std::size_t leaving = active.size();
      for (std::size_t c = 0; c < active.size(); ++c) {
        const double proposed = trial(static_cast<Eigen::Index>(c));
        if (proposed > 0.0) continue;
        const double t = coef[c] / (coef[c] - proposed);
        if (t < step) {
          step = t;
          leaving = c;
        }
      }
      if (leaving == active.size()) {
        for (std::size_t c = 0; c < active.size(); ++c) {
          coef[c] = trial(static_cast<Eigen::Index>(c));
        }
        fitted = a * trial;
        break;
      }
      // Move toward the unconstrained solution until the first coefficient
      // hits zero, drop it, and re-solve on the smaller set.
      for (std::size_t c = 0; c < active.size(); ++c) {
        coef[c] += step * (trial(static_cast<Eigen::Index>(c)) - coef[c]);
      }
      coef.erase(coef.begin() + static_cast<std::ptrdiff_t>(leaving));
      active.erase(active.begin() + static_cast<std::ptrdiff_t>(leaving));
      if (active.empty()) {
        throw NumericalError("support reduction emptied the active set");
      }
    }
  }

  const std::size_t support = active.back();
  std::vector<double> probs(support + 1, 0.0);
  double total = 0.0;
  for (std::size_t i = 1; i <= support; ++i) {
    probs[i] = std::max(0.0, fitted(static_cast<Eigen::Index>(i - 1)));
    total += probs[i];
  }
  if (std::abs(total - 1.0) > 1e-10) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "convex least-squares fit sums to " << total;
    throw NumericalError(msg.str());
  }

  ConvexFit fit{Pmf(std::move(probs), 1e-10), {}, 0.0, min_derivative,
                iterations};
  fit.objective = (fitted - target).squaredNorm();
  fit.structure = detect_knots(fit.phat, options.knot_tol);
  return fit;
}

RestrictedCone::RestrictedCone(std::size_t k,
                               std::vector<std::size_t> free_points)
    : k_(k), free_points_(std::move(free_points)) {
  if (k_ < 2) throw InputError("restricted cone needs dimension k >= 2");
  std::sort(free_points_.begin(), free_points_.end());
  free_points_.erase(std::unique(free_points_.begin(), free_points_.end()),
                     free_points_.end());
  if (free_points_.empty() || free_points_.front() != 1 ||
      free_points_.back() != k_) {
    throw InputError("free point set must contain 1 and k and lie in [1, k]");
  }
  std::size_t next = 0;
  for (std::size_t i = 2; i < k_; ++i) {
    while (next < free_points_.size() && free_points_[next] < i) ++next;
    if (free_points_[next] != i) constrained_.push_back(i);
  }
}

std::vector<double> project_restricted(std::span<const double> t,
                                       const RestrictedCone& cone,
                                       const DykstraOptions& options) {
  if (t.size() != cone.dimension()) {
    throw InputError("vector length does not match cone dimension");
  }
  std::vector<double> x(t.begin(), t.end());
  const auto& rows = cone.constrained();
  if (rows.empty()) return x;

  // Dykstra's correction for half-space {a.q >= 0} is a multiple of a, so a
  // single scalar per constraint suffices.
  std::vector<double> lambda(rows.size(), 0.0);
  constexpr double kNormSq = 6.0;
  for (long sweep = 0; sweep < options.max_sweeps; ++sweep) {
    double moved = 0.0;
    for (std::size_t c = 0; c < rows.size(); ++c) {
      const std::size_t i = rows[c] - 1;
      const double slack = x[i - 1] - 2.0 * x[i] + x[i + 1] + kNormSq * lambda[c];
      const double updated = std::min(0.0, slack / kNormSq);
      const double delta = lambda[c] - updated;
      if (delta != 0.0) {
        x[i - 1] += delta;
        x[i] -= 2.0 * delta;
        x[i + 1] += delta;
        moved = std::max(moved, 2.0 * std::abs(delta));
        lambda[c] = updated;
      }
    }
    if (moved <= options.tol) return x;
  }

  double residual = 0.0;
  for (const auto i : rows) {
    residual = std::min(residual, x[i - 2] - 2.0 * x[i - 1] + x[i]);
  }
  std::ostringstream msg;
  msg << "Dykstra projection exceeded " << options.max_sweeps
      << " sweeps (worst constraint residual " << residual << ")";
  throw NumericalError(msg.str());
}

}  // namespace cvxrich
