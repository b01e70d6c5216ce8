#include "cvxrich/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cvxrich/errors.hpp"

namespace cvxrich {

namespace {

void require_observed(const FrequencyTable& t) {
  if (t.empty()) throw InputError("no observed species");
}

Estimate from_theta(EstimatorMethod method, const FrequencyTable& t,
                    double theta) {
  Estimate e;
  e.method = method;
  e.observed = t.observed();
  e.unclamped_theta = theta;
  e.theta_hat = std::max(1.0, theta);
  e.n_hat_real = static_cast<double>(t.observed()) * e.theta_hat;
  e.n_hat = static_cast<std::int64_t>(std::floor(e.n_hat_real + 1e-9));
  return e;
}

}  // namespace

std::string_view to_string(EstimatorMethod m) {
  switch (m) {
    case EstimatorMethod::empirical: return "empirical";
    case EstimatorMethod::convex: return "convex";
    case EstimatorMethod::chao84: return "chao84";
  }
  return "unknown";
}

EstimatorMethod parse_estimator_method(std::string_view s) {
  if (s == "empirical") return EstimatorMethod::empirical;
  if (s == "convex") return EstimatorMethod::convex;
  if (s == "chao84") return EstimatorMethod::chao84;
  throw InputError("unknown estimator '" + std::string(s) + "'");
}

double theta_from_head(double p1, double p2) { return 2.0 * p1 - p2 + 1.0; }

Estimate estimate_empirical(const FrequencyTable& t) {
  require_observed(t);
  const auto d = static_cast<double>(t.observed());
  const auto s1 = static_cast<double>(t.count(1));
  const auto s2 = static_cast<double>(t.count(2));
  auto e = from_theta(EstimatorMethod::empirical, t, (2.0 * s1 - s2 + d) / d);
  // 2 S_1 - S_2 + D is an integer; avoid a round trip through theta.
  if (!e.clamped()) {
    const auto exact = 2 * t.count(1) - t.count(2) + t.observed();
    e.n_hat_real = static_cast<double>(exact);
    e.n_hat = exact;
  }
  return e;
}

Estimate estimate_convex(const FrequencyTable& t,
                         const ConvexLseOptions& options) {
  require_observed(t);
  auto fit = convex_lse(empirical_freq(t), options);
  auto e = from_theta(EstimatorMethod::convex, t,
                      theta_from_head(fit.phat[1], fit.phat[2]));
  e.fit = std::move(fit);
  return e;
}

Estimate estimate_chao84(const FrequencyTable& t) {
  require_observed(t);
  const auto d = static_cast<double>(t.observed());
  const auto s1 = static_cast<double>(t.count(1));
  const auto s2 = static_cast<double>(t.count(2));
  const double unseen =
      s2 > 0.0 ? s1 * s1 / (2.0 * s2) : s1 * (s1 - 1.0) / 2.0;
  return from_theta(EstimatorMethod::chao84, t, (d + unseen) / d);
}

Estimate estimate(EstimatorMethod method, const FrequencyTable& t,
                  const ConvexLseOptions& options) {
  switch (method) {
    case EstimatorMethod::empirical: return estimate_empirical(t);
    case EstimatorMethod::convex: return estimate_convex(t, options);
    case EstimatorMethod::chao84: return estimate_chao84(t);
  }
  throw InputError("unknown estimator");
}

}  // namespace cvxrich
