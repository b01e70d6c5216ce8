#pragma once

#include <nlohmann/json.hpp>
#include <string>

#include "cvxrich/confidence.hpp"
#include "cvxrich/convex_projection.hpp"
#include "cvxrich/estimators.hpp"
#include "cvxrich/random.hpp"
#include "cvxrich/study.hpp"

// JSON schemas for the records the CLI and the study harness emit. Every
// to_json has a matching from_json so payloads round-trip.
namespace cvxrich {

void to_json(nlohmann::json& j, const SeedSpec& s);
void from_json(const nlohmann::json& j, SeedSpec& s);

/// {"phat": [p_1, p_2, ...], "knots", "tau_hat", "s_hat" (null if none),
///  "k_hat", "free_points", "objective", "min_directional_derivative",
///  "iterations"}
void to_json(nlohmann::json& j, const ConvexFit& fit);
ConvexFit convex_fit_from_json(const nlohmann::json& j);

/// {"method", "observed", "theta_hat", "unclamped_theta", "clamped",
///  "n_hat", "n_hat_real", "fit" (convex only)}
void to_json(nlohmann::json& j, const Estimate& e);
Estimate estimate_from_json(const nlohmann::json& j);

/// {"method", "level", "n_hat", "n_hat_real", "lower", "upper", "lower_int",
///  "upper_int", "n_sims", "quantiles" ([lo, hi] or null), "seed" (or null),
///  "dropped", "unreliable", "warnings"}
void to_json(nlohmann::json& j, const IntervalReport& r);
void from_json(const nlohmann::json& j, IntervalReport& r);

void to_json(nlohmann::json& j, const CellResult& c);
void from_json(const nlohmann::json& j, CellResult& c);

/// "method,level,n_hat,lower,upper,n_sims,seed"
std::string interval_csv_header();
std::string interval_csv_row(const IntervalReport& r);

}  // namespace cvxrich
