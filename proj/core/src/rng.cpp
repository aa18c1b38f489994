#include "autoexplore/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace autoexplore {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
}

std::uint64_t mix64(std::uint64_t x) noexcept {
  x ^= x >> 30;
  x *= 0xBF58476D1CE4E5B9ULL;
  x ^= x >> 27;
  x *= 0x94D049BB133111EBULL;
  x ^= x >> 31;
  return x;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt) noexcept {
  return mix64(mix64(seed + kGolden) ^ mix64(salt * kGolden + 0x632BE59BD9B4E019ULL));
}

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream_id)
    : key_(derive_seed(seed, stream_id)) {}

CounterRng::result_type CounterRng::operator()() {
  ++counter_;
  return mix64(key_ + counter_ * kGolden);
}

double CounterRng::uniform() {
  return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
}

double CounterRng::uniform_open() {
  return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
}

std::int64_t CounterRng::geometric(double success_prob) {
  if (!(success_prob > 0.0) || success_prob > 1.0) {
    throw std::invalid_argument("geometric: success probability must lie in (0, 1]");
  }
  if (success_prob == 1.0) {
    return 0;
  }
  const double draw = std::floor(std::log(uniform_open()) / std::log1p(-success_prob));
  if (draw >= 9.0e18) {
    return std::numeric_limits<std::int64_t>::max();
  }
  return static_cast<std::int64_t>(draw);
}

double CounterRng::normal() {
  const double radius = std::sqrt(-2.0 * std::log(uniform_open()));
  return radius * std::cos(2.0 * 3.14159265358979323846 * uniform());
}

double CounterRng::exponential() { return -std::log(uniform_open()); }

int CounterRng::categorical(std::span<const double> cumulative) {
  const double target = uniform() * cumulative.back();
  const int n = static_cast<int>(cumulative.size());
  for (int i = 0; i < n - 1; ++i) {
    if (target < cumulative[i]) {
      return i;
    }
  }
  return n - 1;
}

int CounterRng::uniform_int(int n) {
  if (n <= 0) {
    throw std::invalid_argument("uniform_int: n must be positive");
  }
  return static_cast<int>(uniform() * n) % n;
}

}  // namespace autoexplore
