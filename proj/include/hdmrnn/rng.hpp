#pragma once

// Portable seeded generator. SplitMix64 (Steele, Lea & Flood): a Weyl
// counter with a fixed 64-bit finalizer, so every platform produces the
// same stream. For seed 42 the first four outputs are
//   0xbdd732262feb6e95, 0x28efe333b266f103, 0x47526757130f9f52, 0x581ce1ff0e4ae394

#include <cstdint>
#include <utility>
#include <vector>

#include "hdmrnn/errors.hpp"

namespace hdmrnn {

class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, bound) by rejection, no modulo bias.
  std::uint64_t below(std::uint64_t bound) {
    if (bound == 0) throw DomainError("SplitMix64::below: bound must be positive");
    const std::uint64_t limit = ~std::uint64_t(0) - (~std::uint64_t(0) % bound);
    std::uint64_t r;
    do {
      r = next();
    } while (r >= limit);
    return r % bound;
  }

 private:
  std::uint64_t state_;
};

// `count` distinct values from [0, population), in draw order (partial
// Fisher-Yates over the index range).
inline std::vector<std::size_t> sample_without_replacement(SplitMix64& rng,
                                                           std::size_t population,
                                                           std::size_t count) {
  if (count > population) throw DomainError("sample_without_replacement: count exceeds population");
  std::vector<std::size_t> pool(population);
  for (std::size_t i = 0; i < population; ++i) pool[i] = i;
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(population - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(count);
  return pool;
}

}  // namespace hdmrnn
