#include "inar/rng.hpp"

namespace inar {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t SeedSpec::derived_seed() const {
  std::uint64_t h = splitmix64(master_);
  for (std::uint64_t index : path_) {
    // Mixing the depth in keeps (a, b) and (a ^ b) paths apart.
    h = splitmix64(h ^ splitmix64(index + 0x632BE59BD9B4E019ULL));
  }
  return h;
}

}  // namespace inar
