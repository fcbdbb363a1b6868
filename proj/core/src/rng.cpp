#include "bohrlab/rng.hpp"

namespace bohrlab {

std::uint64_t seed_stream(std::uint64_t master_seed, std::uint64_t trial_index) noexcept {
  return mix64(mix64(master_seed ^ kSeedStreamKey) + trial_index * kGoldenGamma);
}

}  // namespace bohrlab
