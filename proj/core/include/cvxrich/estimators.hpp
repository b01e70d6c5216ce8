#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

#include "cvxrich/convex_projection.hpp"
#include "cvxrich/frequency_table.hpp"

namespace cvxrich {

enum class EstimatorMethod { empirical, convex, chao84 };

std::string_view to_string(EstimatorMethod m);
EstimatorMethod parse_estimator_method(std::string_view s);

/// Point estimate of the number of species.
///
/// n_hat_real = D * theta_hat carries all downstream arithmetic; n_hat is its
/// floor and exists only for reporting. theta_hat is clamped to >= 1 so that
/// the estimate never falls below D; unclamped_theta keeps the raw value.
struct Estimate {
  EstimatorMethod method = EstimatorMethod::empirical;
  std::int64_t observed = 0;
  double theta_hat = 1.0;
  double unclamped_theta = 1.0;
  double n_hat_real = 0.0;
  std::int64_t n_hat = 0;
  std::optional<ConvexFit> fit;

  bool clamped() const { return unclamped_theta < theta_hat; }
};

/// theta = 2 p_1 - p_2 + 1 from a zero-truncated pmf estimate.
double theta_from_head(double p1, double p2);

/// N^f = 2 S_1 - S_2 + D.
Estimate estimate_empirical(const FrequencyTable& t);

/// N = D (2 phat_1 - phat_2 + 1) with phat the convex LSE of f.
Estimate estimate_convex(const FrequencyTable& t,
                         const ConvexLseOptions& options = {});

/// Chao (1984): D + S_1^2 / (2 S_2), or D + S_1 (S_1 - 1) / 2 when S_2 = 0.
Estimate estimate_chao84(const FrequencyTable& t);

Estimate estimate(EstimatorMethod method, const FrequencyTable& t,
                  const ConvexLseOptions& options = {});

}  // namespace cvxrich
