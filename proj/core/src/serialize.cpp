#include "cvxrich/serialize.hpp"

#include <cmath>
#include <cstdio>

#include "cvxrich/errors.hpp"

namespace cvxrich {

using nlohmann::json;

void to_json(json& j, const SeedSpec& s) {
  j = json{{"master_seed", s.master_seed}, {"stream_id", s.stream_id}};
}

void from_json(const json& j, SeedSpec& s) {
  j.at("master_seed").get_to(s.master_seed);
  j.at("stream_id").get_to(s.stream_id);
}

void to_json(json& j, const ConvexFit& fit) {
  const auto probs = fit.phat.probs();
  j = json{{"phat", std::vector<double>(probs.begin() + 1, probs.end())},
           {"knots", fit.structure.knots},
           {"tau_hat", fit.structure.tau_hat},
           {"s_hat", fit.structure.s_hat ? json(*fit.structure.s_hat) : json()},
           {"k_hat", fit.structure.k_hat},
           {"free_points", fit.structure.free_points},
           {"objective", fit.objective},
           {"min_directional_derivative", fit.min_directional_derivative},
           {"iterations", fit.iterations}};
}

ConvexFit convex_fit_from_json(const json& j) {
  auto phat = j.at("phat").get<std::vector<double>>();
  phat.insert(phat.begin(), 0.0);
  ConvexFit fit{Pmf(std::move(phat), 1e-10), {}, 0.0, 0.0, 0};
  j.at("knots").get_to(fit.structure.knots);
  j.at("tau_hat").get_to(fit.structure.tau_hat);
  if (!j.at("s_hat").is_null()) fit.structure.s_hat = j.at("s_hat").get<std::size_t>();
  j.at("k_hat").get_to(fit.structure.k_hat);
  j.at("free_points").get_to(fit.structure.free_points);
  j.at("objective").get_to(fit.objective);
  j.at("min_directional_derivative").get_to(fit.min_directional_derivative);
  j.at("iterations").get_to(fit.iterations);
  return fit;
}

void to_json(json& j, const Estimate& e) {
  j = json{{"method", to_string(e.method)},
           {"observed", e.observed},
           {"theta_hat", e.theta_hat},
           {"unclamped_theta", e.unclamped_theta},
           {"clamped", e.clamped()},
           {"n_hat", e.n_hat},
           {"n_hat_real", e.n_hat_real}};
  if (e.fit) j["fit"] = *e.fit;
}

Estimate estimate_from_json(const json& j) {
  Estimate e;
  e.method = parse_estimator_method(j.at("method").get<std::string>());
  j.at("observed").get_to(e.observed);
  j.at("theta_hat").get_to(e.theta_hat);
  j.at("unclamped_theta").get_to(e.unclamped_theta);
  j.at("n_hat").get_to(e.n_hat);
  j.at("n_hat_real").get_to(e.n_hat_real);
  if (j.contains("fit")) e.fit = convex_fit_from_json(j.at("fit"));
  return e;
}

void to_json(json& j, const IntervalReport& r) {
  j = json{{"method", to_string(r.method)},
           {"level", r.level},
           {"n_hat", static_cast<std::int64_t>(std::floor(r.n_hat_real + 1e-9))},
           {"n_hat_real", r.n_hat_real},
           {"lower", r.lower},
           {"upper", r.upper},
           {"lower_int", r.lower_int},
           {"upper_int", r.upper_int},
           {"n_sims", r.n_sims},
           {"quantiles", r.quantiles ? json::array({r.quantiles->first,
                                                    r.quantiles->second})
                                     : json()},
           {"seed", r.seed ? json(*r.seed) : json()},
           {"dropped", r.dropped},
           {"unreliable", r.unreliable},
           {"warnings", r.warnings}};
}

void from_json(const json& j, IntervalReport& r) {
  r.method = parse_interval_method(j.at("method").get<std::string>());
  j.at("level").get_to(r.level);
  j.at("n_hat_real").get_to(r.n_hat_real);
  j.at("lower").get_to(r.lower);
  j.at("upper").get_to(r.upper);
  j.at("lower_int").get_to(r.lower_int);
  j.at("upper_int").get_to(r.upper_int);
  j.at("n_sims").get_to(r.n_sims);
  if (const auto& q = j.at("quantiles"); !q.is_null()) {
    r.quantiles = std::make_pair(q.at(0).get<double>(), q.at(1).get<double>());
  } else {
    r.quantiles.reset();
  }
  if (const auto& s = j.at("seed"); !s.is_null()) {
    r.seed = s.get<SeedSpec>();
  } else {
    r.seed.reset();
  }
  j.at("dropped").get_to(r.dropped);
  j.at("unreliable").get_to(r.unreliable);
  j.at("warnings").get_to(r.warnings);
}

void to_json(json& j, const CellResult& c) {
  json estimators = json::array();
  for (const auto& e : c.estimators) {
    estimators.push_back({{"method", to_string(e.method)},
                          {"n_ok", e.n_ok},
                          {"failures", e.failures},
                          {"mean", e.mean},
                          {"bias", e.bias},
                          {"se", e.se},
                          {"ep", e.ep},
                          {"mean_theta", e.mean_theta}});
  }
  json intervals = json::array();
  for (const auto& i : c.intervals) {
    intervals.push_back({{"method", to_string(i.method)},
                         {"n_ok", i.n_ok},
                         {"failures", i.failures},
                         {"left_miss_pct", i.left_miss},
                         {"right_miss_pct", i.right_miss},
                         {"mc_se_pct", i.mc_se},
                         {"mean_lower", i.mean_lower},
                         {"mean_upper", i.mean_upper},
                         {"unreliable", i.unreliable}});
  }
  j = json{{"truth", to_string(c.truth)}, {"nu", c.nu},
           {"p0", c.p0},                  {"n", c.n},
           {"n_reps_done", c.n_reps_done}, {"estimators", estimators},
           {"intervals", intervals}};
}

void from_json(const json& j, CellResult& c) {
  c.truth = parse_truth_kind(j.at("truth").get<std::string>());
  j.at("nu").get_to(c.nu);
  j.at("p0").get_to(c.p0);
  j.at("n").get_to(c.n);
  j.at("n_reps_done").get_to(c.n_reps_done);
  c.estimators.clear();
  for (const auto& e : j.at("estimators")) {
    EstimatorSummary s;
    s.method = parse_estimator_method(e.at("method").get<std::string>());
    e.at("n_ok").get_to(s.n_ok);
    e.at("failures").get_to(s.failures);
    e.at("mean").get_to(s.mean);
    e.at("bias").get_to(s.bias);
    e.at("se").get_to(s.se);
    e.at("ep").get_to(s.ep);
    e.at("mean_theta").get_to(s.mean_theta);
    c.estimators.push_back(s);
  }
  c.intervals.clear();
  for (const auto& i : j.at("intervals")) {
    IntervalSummary s;
    s.method = parse_interval_method(i.at("method").get<std::string>());
    i.at("n_ok").get_to(s.n_ok);
    i.at("failures").get_to(s.failures);
    i.at("left_miss_pct").get_to(s.left_miss);
    i.at("right_miss_pct").get_to(s.right_miss);
    i.at("mc_se_pct").get_to(s.mc_se);
    i.at("mean_lower").get_to(s.mean_lower);
    i.at("mean_upper").get_to(s.mean_upper);
    i.at("unreliable").get_to(s.unreliable);
    c.intervals.push_back(s);
  }
}

std::string interval_csv_header() {
  return "method,level,n_hat,lower,upper,n_sims,seed";
}

std::string interval_csv_row(const IntervalReport& r) {
  char buf[256];
  const std::string seed =
      r.seed ? std::to_string(r.seed->master_seed) + ":" +
                   std::to_string(r.seed->stream_id)
             : std::string();
  std::snprintf(buf, sizeof buf, "%s,%.6g,%.10g,%.10g,%.10g,%d,",
                std::string(to_string(r.method)).c_str(), r.level,
                r.n_hat_real, r.lower, r.upper, r.n_sims);
  return buf + seed;
}

}  // namespace cvxrich
