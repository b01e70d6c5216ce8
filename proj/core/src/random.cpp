#include "cvxrich/random.hpp"

#include <array>

namespace cvxrich {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

SeedSpec SeedSpec::child(std::uint64_t index) const {
  return SeedSpec{master_seed,
                  splitmix64(splitmix64(stream_id) ^ splitmix64(~index))};
}

Engine make_engine(const SeedSpec& seed) {
  std::uint64_t state = splitmix64(seed.master_seed) ^
                        splitmix64(seed.stream_id + 0x632be59bd9b4e019ULL);
  std::array<std::uint32_t, 8> words{};
  for (std::size_t i = 0; i < words.size(); i += 2) {
    state = splitmix64(state);
    words[i] = static_cast<std::uint32_t>(state);
    words[i + 1] = static_cast<std::uint32_t>(state >> 32);
  }
  std::seed_seq seq(words.begin(), words.end());
  return Engine(seq);
}

}  // namespace cvxrich
