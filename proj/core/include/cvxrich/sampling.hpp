#pragma once

#include <cstdint>
#include <vector>

#include "cvxrich/frequency_table.hpp"
#include "cvxrich/pmf.hpp"
#include "cvxrich/random.hpp"

namespace cvxrich {

/// Inverse-CDF sampler over a finite-support pmf.
class DiscreteSampler {
 public:
  explicit DiscreteSampler(const Pmf& p);

  std::size_t operator()(Engine& engine) const;

 private:
  std::vector<double> cdf_;
};

enum class SamplingPath {
  /// N i.i.d. abundances from p; zeros discarded.
  direct,
  /// D ~ Binomial(N, 1 - p_0), then D draws from the zero-truncated law.
  two_stage,
};

FrequencyTable simulate_counts(const Pmf& p, std::int64_t n_species,
                               const SeedSpec& seed,
                               SamplingPath path = SamplingPath::direct);

/// D i.i.d. draws from a zero-truncated pmf, tabulated.
FrequencyTable sample_truncated(const DiscreteSampler& truncated,
                                std::int64_t d, Engine& engine);

}  // namespace cvxrich
