#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace inar {

/// Seed used by every entry point when the caller does not supply one.
/// Nothing in the library draws on wall-clock or device entropy.
inline constexpr std::uint64_t kDefaultSeed = 0xC0C0'A75E'ED00ULL;

/// Address of an independent random stream: a master seed plus a path of
/// child indices (replicate, bootstrap draw, ...). Identical specs produce
/// identical streams regardless of which thread or in which order they are
/// consumed.
class SeedSpec {
 public:
  SeedSpec() = default;
  explicit SeedSpec(std::uint64_t master, std::vector<std::uint64_t> path = {})
      : master_(master), path_(std::move(path)) {}

  [[nodiscard]] SeedSpec child(std::uint64_t index) const {
    SeedSpec out = *this;
    out.path_.push_back(index);
    return out;
  }

  [[nodiscard]] std::uint64_t master() const { return master_; }
  [[nodiscard]] const std::vector<std::uint64_t>& path() const { return path_; }

  /// 64-bit seed obtained by folding the path into the master with splitmix64.
  [[nodiscard]] std::uint64_t derived_seed() const;

  friend bool operator==(const SeedSpec&, const SeedSpec&) = default;

 private:
  std::uint64_t master_ = kDefaultSeed;
  std::vector<std::uint64_t> path_;
};

/// Sequential generator bound to one SeedSpec.
class RandomStream {
 public:
  explicit RandomStream(const SeedSpec& spec) : engine_(spec.derived_seed()) {}

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace inar
