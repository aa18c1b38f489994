#pragma once

#include <cstdint>
#include <limits>
#include <span>

namespace autoexplore {

/**
 * Counter-based 64-bit generator.
 *
 * The n-th output is a SplitMix64 finalization of `key + n * golden`, so a
 * (seed, stream id, counter) triple fully determines every draw. Distinct
 * stream ids give statistically independent substreams of the same seed.
 * All derived variates (uniform, geometric, categorical) are computed here
 * rather than through <random> distributions so results are identical across
 * standard library implementations.
 */
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit CounterRng(std::uint64_t seed = 0, std::uint64_t stream_id = 0);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

  /// Uniform on [0, 1) with 53 bits of resolution.
  double uniform();
  /// Uniform on (0, 1); never returns 0, safe for logarithms.
  double uniform_open();
  /// Number of failures before the first success, success probability p in (0, 1].
  std::int64_t geometric(double success_prob);
  /// Standard normal via Box-Muller; consumes two draws.
  double normal();
  /// Exponential(1).
  double exponential();
  /// Index i with probability weight[i] given the running cumulative sums.
  /// The last entry of `cumulative` is treated as the total mass.
  int categorical(std::span<const double> cumulative);
  /// Uniform integer in [0, n).
  int uniform_int(int n);

  std::uint64_t counter() const noexcept { return counter_; }
  std::uint64_t key() const noexcept { return key_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Deterministic child seed, e.g. for replicate r of a run seeded with `seed`.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt) noexcept;

}  // namespace autoexplore
