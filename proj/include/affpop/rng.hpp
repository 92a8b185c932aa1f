/**
 * @file rng.hpp
 * @brief Counter-based random streams and the sampling helpers built on them.
 *
 * Every (seed, bar, stream) triple owns an independent SplitMix64 sequence, so
 * adding a track or reordering draws in one track never perturbs another.
 */
#pragma once

#include <concepts>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <stdexcept>

namespace affpop {

/// Named random streams. One stream per track per bar.
enum class Stream : std::uint32_t {
  harmony = 1,
  register_shift = 2,
  strummed = 3,
  bass = 4,
  percussion = 5,
  plucked = 6,
  melody = 7,
};

namespace detail {

constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace detail

/// SplitMix64 keyed by (seed, bar, stream). State is just (key, counter).
class CounterRng {
 public:
  using result_type = std::uint64_t;

  constexpr CounterRng() = default;
  constexpr explicit CounterRng(std::uint64_t key, std::uint64_t counter = 0) noexcept
      : key_(key), counter_(counter) {}

  static constexpr CounterRng for_stream(std::uint64_t seed, std::uint64_t bar, Stream stream) noexcept {
    const std::uint64_t s = detail::mix64(static_cast<std::uint64_t>(stream) * 0xD1B54A32D192ED03ULL);
    const std::uint64_t b = detail::mix64(bar ^ s);
    return CounterRng(detail::mix64(seed ^ b));
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  constexpr result_type operator()() noexcept {
    ++counter_;
    return detail::mix64(key_ + counter_ * 0x9E3779B97F4A7C15ULL);
  }

  constexpr std::uint64_t key() const noexcept { return key_; }
  constexpr std::uint64_t counter() const noexcept { return counter_; }

  friend constexpr bool operator==(const CounterRng&, const CounterRng&) = default;

 private:
  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
};

/// Uniform double in [0, 1) from 53 random bits. Requires a full 64-bit generator.
template <std::uniform_random_bit_generator Rng>
double unit_interval(Rng& rng) {
  static_assert(Rng::min() == 0 && Rng::max() == std::numeric_limits<std::uint64_t>::max(),
                "unit_interval needs a full-range 64-bit generator");
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform integer in [0, n). Rejection sampling keeps it exactly uniform.
template <std::uniform_random_bit_generator Rng>
std::size_t uniform_index(Rng& rng, std::size_t n) {
  if (n == 0) throw std::invalid_argument("uniform_index: empty range");
  const std::uint64_t bound = static_cast<std::uint64_t>(n);
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x = rng();
  while (x >= limit) x = rng();
  return static_cast<std::size_t>(x % bound);
}

/// Index drawn with probability proportional to weights. Weights need not be normalized.
template <std::uniform_random_bit_generator Rng>
std::size_t weighted_index(Rng& rng, std::span<const double> weights) {
  double total = 0.0;
  for (double w : weights) total += w;
  if (weights.empty() || !(total > 0.0)) throw std::invalid_argument("weighted_index: no positive weight");
  const double u = unit_interval(rng) * total;
  double acc = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] <= 0.0) continue;
    acc += weights[i];
    last_positive = i;
    if (u < acc) return i;
  }
  return last_positive;
}

template <std::uniform_random_bit_generator Rng>
bool bernoulli(Rng& rng, double p) {
  return unit_interval(rng) < p;
}

}  // namespace affpop
