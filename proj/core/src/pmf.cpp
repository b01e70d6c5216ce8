#include "cvxrich/pmf.hpp"

#include <cmath>
#include <numeric>
#include <sstream>
#include <string>

#include "cvxrich/errors.hpp"

namespace cvxrich {

Pmf::Pmf(std::vector<double> probs, double sum_tolerance)
    : probs_(std::move(probs)) {
  for (std::size_t i = 0; i < probs_.size(); ++i) {
    if (!std::isfinite(probs_[i]) || probs_[i] < 0.0) {
      std::ostringstream msg;
      msg << "pmf entry " << i << " is negative or not finite (" << probs_[i]
          << ")";
      throw InputError(msg.str());
    }
  }
  while (!probs_.empty() && probs_.back() == 0.0) probs_.pop_back();
  if (probs_.empty()) throw InputError("pmf has no positive mass");

  const double total = std::accumulate(probs_.begin(), probs_.end(), 0.0);
  if (std::abs(total - 1.0) > sum_tolerance) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "pmf sums to " << total << ", not 1";
    throw InputError(msg.str());
  }
}

Pmf Pmf::dirac(std::size_t at) {
  std::vector<double> probs(at + 1, 0.0);
  probs[at] = 1.0;
  return Pmf(std::move(probs));
}

double Pmf::second_difference(std::size_t i) const {
  return (*this)[i - 1] + (*this)[i + 1] - 2.0 * (*this)[i];
}

TriangularMixture::TriangularMixture(std::map<std::size_t, double> weights)
    : weights_(std::move(weights)) {
  if (weights_.empty()) throw InputError("mixture has no components");
  double total = 0.0;
  for (const auto& [j, w] : weights_) {
    if (j == 0) throw InputError("triangular component index must be >= 1");
    if (!std::isfinite(w) || w < 0.0) {
      throw InputError("mixture weight at component " + std::to_string(j) +
                       " is negative");
    }
    total += w;
  }
  if (std::abs(total - 1.0) > kPmfSumTolerance) {
    throw InputError("mixture weights do not sum to 1");
  }
}

double TriangularMixture::weight(std::size_t j) const {
  const auto it = weights_.find(j);
  return it == weights_.end() ? 0.0 : it->second;
}

GammaPoissonParams::GammaPoissonParams(double nu_, double mu_)
    : nu(nu_), mu(mu_) {
  if (!(nu > 0.0) || !std::isfinite(nu)) {
    throw InputError("Gamma-Poisson shape nu must be > 0");
  }
  if (!(mu > 0.0 && mu < 1.0)) {
    throw InputError("Gamma-Poisson mu must lie in (0, 1)");
  }
}

GammaPoissonParams GammaPoissonParams::at_threshold(double nu) {
  if (!(nu > 1.0)) {
    throw InputError("threshold Gamma-Poisson requires nu > 1");
  }
  return GammaPoissonParams(nu, 1.0 - convexity_threshold(nu));
}

Pmf triangular_pmf(std::size_t j, std::size_t length) {
  if (j == 0) throw InputError("triangular component index must be >= 1");
  if (length < j) throw InputError("length too small to hold T_j");
  std::vector<double> probs(length, 0.0);
  const double denom = static_cast<double>(j) * static_cast<double>(j + 1);
  for (std::size_t i = 0; i < j; ++i) {
    probs[i] = 2.0 * static_cast<double>(j - i) / denom;
  }
  return Pmf(std::move(probs));
}

TriangularMixture mixture_weights(const Pmf& p, double tol) {
  std::map<std::size_t, double> weights;
  double total = 0.0;
  // Second differences vanish beyond support_max + 1.
  for (std::size_t j = 1; j <= p.support_max() + 1; ++j) {
    const double second = p.second_difference(j);
    if (second < -tol) {
      std::ostringstream msg;
      msg << "pmf is not convex at index " << j << " (second difference "
          << second << ")";
      throw InputError(msg.str());
    }
    if (second <= 0.0) continue;
    const double w = 0.5 * static_cast<double>(j) *
                     static_cast<double>(j + 1) * second;
    weights.emplace(j, w);
    total += w;
  }
  for (auto& entry : weights) entry.second /= total;
  return TriangularMixture(std::move(weights));
}

Pmf from_mixture(const TriangularMixture& m, std::size_t length) {
  if (length < m.max_component()) {
    throw InputError("length " + std::to_string(length) +
                     " cannot hold component T_" +
                     std::to_string(m.max_component()));
  }
  std::vector<double> probs(length, 0.0);
  for (const auto& [j, w] : m.weights()) {
    const double denom = static_cast<double>(j) * static_cast<double>(j + 1);
    for (std::size_t i = 0; i < j; ++i) {
      probs[i] += w * 2.0 * static_cast<double>(j - i) / denom;
    }
  }
  return Pmf(std::move(probs));
}

bool is_convex(const Pmf& p, double tol) {
  for (std::size_t i = 1; i <= p.support_max() + 1; ++i) {
    if (p.second_difference(i) < -tol) return false;
  }
  return true;
}

bool is_convex_abundance(const Pmf& p, double tol) {
  return is_convex(p, tol) && std::abs(p.second_difference(1)) <= tol;
}

Pmf gamma_poisson(const GammaPoissonParams& params, double tail_cutoff) {
  if (!(tail_cutoff > 0.0 && tail_cutoff <= 1e-6)) {
    throw InputError("tail cutoff must lie in (0, 1e-6]");
  }
  const double ratio = 1.0 - params.mu;
  std::vector<double> probs;
  double term = std::exp(params.nu * std::log(params.mu));
  double cumulative = 0.0;
  for (std::size_t j = 0;; ++j) {
    probs.push_back(term);
    cumulative += term;
    if (1.0 - cumulative < tail_cutoff) break;
    term *= (static_cast<double>(j) + params.nu) / static_cast<double>(j + 1) *
            ratio;
    if (term == 0.0) break;
  }
  probs.back() += 1.0 - cumulative;
  if (probs.back() < 0.0) probs.back() = 0.0;
  return Pmf(std::move(probs));
}

double convexity_threshold(double nu) {
  if (!(nu >= 1.0) || !std::isfinite(nu)) {
    throw InputError("convexity threshold is defined for nu >= 1");
  }
  return (2.0 * nu - std::sqrt(2.0 * nu * (nu - 1.0))) / (nu * (nu + 1.0));
}

Pmf truncate_zero(const Pmf& p) {
  const double observed = 1.0 - p[0];
  if (!(observed > 0.0)) {
    throw InputError("p_0 = 1: no species can be observed");
  }
  std::vector<double> probs(p.size(), 0.0);
  for (std::size_t j = 1; j < p.size(); ++j) probs[j] = p[j] / observed;
  return Pmf(std::move(probs));
}

Pmf robustness_perturb(const Pmf& p) {
  if (!(p[0] < 1.0)) throw InputError("p_0 = 1: no species can be observed");
  const double q0 = 0.5 * (p[0] + p[1]);
  const double scale = (1.0 - q0) / (1.0 - p[0]);
  std::vector<double> probs(p.size(), 0.0);
  probs[0] = q0;
  for (std::size_t j = 1; j < p.size(); ++j) probs[j] = p[j] * scale;
  return Pmf(std::move(probs));
}

}  // namespace cvxrich
