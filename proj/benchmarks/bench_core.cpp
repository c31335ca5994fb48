#include <benchmark/benchmark.h>

#include "sos/certificate.hpp"
#include "sos/expansion.hpp"
#include "sos/moment.hpp"
#include "sos/poly.hpp"
#include "sos/rng.hpp"
#include "sos/sdp.hpp"

namespace sos {
namespace {

Polynomial dense_poly(std::size_t n, int degree, std::uint64_t seed) {
  CounterRng rng(seed);
  Polynomial p(n);
  for (const auto& m : monomials_up_to(n, degree)) p.add_term(m, static_cast<double>(rng() % 7) - 3.0);
  return p;
}

void BM_PolyMultiply(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Polynomial a = dense_poly(n, 3, 1), b = dense_poly(n, 3, 2);
  for (auto _ : state) benchmark::DoNotOptimize(a * b);
  state.counters["terms"] = static_cast<double>(a.terms().size());
}
BENCHMARK(BM_PolyMultiply)->Arg(3)->Arg(5)->Arg(8);

void BM_BuildRelaxation(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  PolynomialSystem s(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    Polynomial x = Polynomial::variable(n, i);
    s.equalities.push_back(x * x - Polynomial::constant(n, 1.0));
  }
  s.objective = dense_poly(n, 4, 3);
  for (auto _ : state) benchmark::DoNotOptimize(build_relaxation(s, 4));
}
BENCHMARK(BM_BuildRelaxation)->Arg(3)->Arg(5)->Arg(7)->Unit(benchmark::kMillisecond);

void BM_SolveExpansionSdp(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Graph g = Graph::random_regular(n, 3, 7);
  for (auto _ : state) benchmark::DoNotOptimize(sos2_estimate(g, ExpansionMode::exact, n / 2));
}
BENCHMARK(BM_SolveExpansionSdp)->Arg(8)->Arg(12)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_LocalMinimaDegreeFour(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  PolynomialSystem s(n);
  Polynomial p(n), sum(n);
  const double n4 = static_cast<double>(n * n * n * n);
  for (std::uint32_t i = 0; i < n; ++i) {
    Polynomial x = Polynomial::variable(n, i), q = x * x - x;
    p += n4 * (q * q);
    sum += x;
  }
  s.objective = p + sum * sum;
  for (auto _ : state) benchmark::DoNotOptimize(sos_estimate(s, 4));
}
BENCHMARK(BM_LocalMinimaDegreeFour)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

void BM_HypercubeRefutation(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Polynomial p0 = Polynomial::constant(n, 0.5);
  for (std::uint32_t i = 0; i < n; ++i) p0 += 0.1 * Polynomial::variable(n, i);
  for (auto _ : state) benchmark::DoNotOptimize(hypercube_refutation(p0));
}
BENCHMARK(BM_HypercubeRefutation)->Arg(2)->Arg(4)->Arg(6);

}  // namespace
}  // namespace sos

BENCHMARK_MAIN();
