// Deterministic counter-based random number generation.
//
// All sampling in this library derives from a keyed 64-bit mixing function
// (the splitmix64 finalizer). A (seed, stream) pair selects an independent
// substream and every draw is addressed by an explicit counter, so samplers
// can assign one substream per node pair. Outputs are reproducible across
// platforms and independent of evaluation order.

#pragma once

#include <cstdint>
#include <limits>

#include "corrnet/error.hpp"

namespace corrnet {

inline std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Stateless generator: draw k of substream s is a pure function of
// (seed, s, k).
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
      : key_(splitmix64(splitmix64(seed) ^
                        (0xD1B54A32D192ED03ull * (stream + 1)))) {}

  std::uint64_t bits(std::uint64_t counter) const {
    return splitmix64(key_ ^ (0x9E3779B97F4A7C15ull * (counter + 1)));
  }

  // Uniform double in [0, 1) with 53 random bits.
  double uniform(std::uint64_t counter) const {
    return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
  }

 private:
  std::uint64_t key_;
};

// Convenience wrapper that advances a counter internally. Used where draws
// are inherently sequential (shuffles, rejection samplers).
class SequentialRng {
 public:
  explicit SequentialRng(std::uint64_t seed, std::uint64_t stream = 0)
      : rng_(seed, stream) {}

  using result_type = std::uint64_t;
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<std::uint64_t>::max();
  }

  result_type operator()() { return rng_.bits(counter_++); }

  double uniform() { return rng_.uniform(counter_++); }

  // Unbiased integer in [0, bound) via rejection.
  std::uint64_t below(std::uint64_t bound) {
    if (bound == 0) fail(Err::EmptyInput, "below() requires a positive bound");
    const std::uint64_t limit = max() - max() % bound;
    std::uint64_t x;
    do {
      x = (*this)();
    } while (x >= limit);
    return x % bound;
  }

 private:
  CounterRng rng_;
  std::uint64_t counter_ = 0;
};

// In-place Fisher-Yates shuffle with our own generator so results do not
// depend on a standard library implementation.
template <typename Vec>
void deterministic_shuffle(Vec& values, SequentialRng& rng) {
  const std::uint64_t n = static_cast<std::uint64_t>(values.size());
  for (std::uint64_t i = n; i > 1; --i) {
    const std::uint64_t j = rng.below(i);
    using std::swap;
    swap(values[i - 1], values[j]);
  }
}

}  // namespace corrnet
