#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <vector>

namespace sos {

// Counter-based generator: output k is a SplitMix64 finalization of
// key + (k + 1) * golden. Streams are derived by re-keying, so trials keyed by
// (seed, stream) are reproducible regardless of execution order.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit CounterRng(std::uint64_t seed = 0) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept;

  // Independent child generator for stream `id`.
  CounterRng split(std::uint64_t id) const noexcept;

  std::uint64_t key() const noexcept { return key_; }
  std::uint64_t counter() const noexcept { return counter_; }

 private:
  struct Keyed {};
  CounterRng(std::uint64_t key, Keyed) noexcept : key_(key) {}

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

std::uint64_t mix64(std::uint64_t z) noexcept;

std::vector<double> gaussian_vector(CounterRng& rng, std::size_t n);
// Uniform on the unit sphere in R^n.
std::vector<double> random_unit_vector(CounterRng& rng, std::size_t n);

}  // namespace sos
