#pragma once

#include <cstdint>
#include <random>

namespace cvxrich {

/// Identifies an independent random stream. Replicates derive their own
/// streams with child(), so results never depend on execution order.
struct SeedSpec {
  std::uint64_t master_seed = 0;
  std::uint64_t stream_id = 0;

  /// Stream for sub-task `index` of this stream.
  SeedSpec child(std::uint64_t index) const;

  friend bool operator==(const SeedSpec&, const SeedSpec&) = default;
};

using Engine = std::mt19937_64;

/// Engine keyed by (master_seed, stream_id) through a SplitMix64 mix.
Engine make_engine(const SeedSpec& seed);

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace cvxrich
