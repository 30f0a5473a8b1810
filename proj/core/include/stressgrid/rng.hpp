#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace stressgrid {

// All randomness goes through a 64-bit Mersenne Twister. The engine itself is
// specified bit-for-bit by the standard; the helpers below replace the
// implementation-defined std:: distributions so traces are identical across
// standard libraries.
using Rng = std::mt19937_64;

/// SplitMix64 finalizer. Used to derive independent stream seeds.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Seed for a named sub-stream of a run (topology, consumption, policy, ...).
constexpr std::uint64_t stream_seed(std::uint64_t run_seed, std::uint64_t stream) noexcept {
  return mix64(run_seed ^ mix64(stream + 1));
}

/// Uniform double in [0, 1) with 53 bits of resolution.
inline double uniform01(Rng& rng) noexcept {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform integer in [lo, hi]; requires lo <= hi.
inline std::int64_t uniform_int(Rng& rng, std::int64_t lo, std::int64_t hi) noexcept {
  const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
  return lo + static_cast<std::int64_t>(rng() % span);
}

/// Fisher-Yates shuffle with uniform_int (std::shuffle is not portable).
template <class T>
void shuffle(std::span<T> items, Rng& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(uniform_int(rng, 0, static_cast<std::int64_t>(i - 1)));
    using std::swap;
    swap(items[i - 1], items[j]);
  }
}

}  // namespace stressgrid
