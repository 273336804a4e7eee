#pragma once

#include <cstdint>
#include <limits>
#include <random>

namespace cfdm {

/// splitmix64 mix; used to derive independent sub-stream seeds.
inline std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seedable generator with a portable uniform-range draw. std::uniform_*
/// distributions are implementation-defined across standard libraries, so
/// draws go through our own rejection loop to keep runs reproducible.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), eng_(seed) {}

  std::uint64_t seed() const { return seed_; }

  /// Uniform integer in [lo, hi], inclusive.
  std::uint64_t range(std::uint64_t lo, std::uint64_t hi) {
    if (lo >= hi) return lo;
    std::uint64_t span = hi - lo + 1;
    constexpr std::uint64_t top = std::numeric_limits<std::uint64_t>::max();
    std::uint64_t excess = (top % span + 1) % span;
    std::uint64_t bound = top - excess;
    std::uint64_t x;
    do {
      x = eng_();
    } while (x > bound);
    return lo + x % span;
  }

  /// Uniform double in [0, 1).
  double unit() {
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
  }

  /// Independent generator for a named sub-stream of this seed.
  Rng split(std::uint64_t stream) const {
    return Rng(mix_seed(seed_ ^ mix_seed(stream)));
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 eng_;
};

}  // namespace cfdm
