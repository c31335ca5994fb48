#include "sos/rng.hpp"

#include <cmath>

namespace sos {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
}

std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

CounterRng::CounterRng(std::uint64_t seed) noexcept : key_(mix64(seed ^ 0x5DEECE66DULL)) {}

CounterRng::result_type CounterRng::operator()() noexcept {
  ++counter_;
  return mix64(key_ + counter_ * kGolden);
}

CounterRng CounterRng::split(std::uint64_t id) const noexcept {
  return CounterRng(mix64(key_ ^ mix64(id + kGolden)), Keyed{});
}

std::vector<double> gaussian_vector(CounterRng& rng, std::size_t n) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = normal(rng);
  return v;
}

std::vector<double> random_unit_vector(CounterRng& rng, std::size_t n) {
  for (;;) {
    auto v = gaussian_vector(rng, n);
    double norm = 0.0;
    for (double x : v) norm += x * x;
    norm = std::sqrt(norm);
    if (norm < 1e-300) continue;
    for (auto& x : v) x /= norm;
    return v;
  }
}

}  // namespace sos
