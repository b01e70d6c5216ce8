#include "cvxrich/sampling.hpp"

#include <algorithm>
#include <limits>
#include <map>

#include "cvxrich/errors.hpp"

namespace cvxrich {

DiscreteSampler::DiscreteSampler(const Pmf& p) {
  cdf_.reserve(p.size());
  double running = 0.0;
  for (const double mass : p.probs()) {
    running += mass;
    cdf_.push_back(running);
  }
  // The last entry has positive mass; make it absorb rounding slack.
  cdf_.back() = std::numeric_limits<double>::infinity();
}

std::size_t DiscreteSampler::operator()(Engine& engine) const {
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(engine);
  const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  return static_cast<std::size_t>(it - cdf_.begin());
}

FrequencyTable sample_truncated(const DiscreteSampler& truncated,
                                std::int64_t d, Engine& engine) {
  std::map<std::int64_t, std::int64_t> counts;
  for (std::int64_t i = 0; i < d; ++i) {
    ++counts[static_cast<std::int64_t>(truncated(engine))];
  }
  return FrequencyTable(counts);
}

FrequencyTable simulate_counts(const Pmf& p, std::int64_t n_species,
                               const SeedSpec& seed, SamplingPath path) {
  if (n_species < 1) throw InputError("number of species must be >= 1");
  auto engine = make_engine(seed);

  if (path == SamplingPath::direct) {
    const DiscreteSampler sampler(p);
    std::map<std::int64_t, std::int64_t> counts;
    for (std::int64_t i = 0; i < n_species; ++i) {
      const auto a = sampler(engine);
      if (a > 0) ++counts[static_cast<std::int64_t>(a)];
    }
    return FrequencyTable(counts);
  }

  if (p[0] >= 1.0) return FrequencyTable{};
  std::binomial_distribution<std::int64_t> observed(n_species, 1.0 - p[0]);
  const auto d = observed(engine);
  const DiscreteSampler truncated(truncate_zero(p));
  return sample_truncated(truncated, d, engine);
}

}  // namespace cvxrich
