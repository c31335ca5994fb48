#pragma once

// Generated problem corpora shared by the unit tests and the acceptance run.

#include <cmath>
#include <cstdint>
#include <vector>

#include "sos/expansion.hpp"
#include "sos/moment.hpp"
#include "sos/poly.hpp"
#include "sos/rng.hpp"
#include "test_support.hpp"

namespace sos::test {

// 50 random 3-regular graphs, ten each on 4, 6, 8, 10 and 12 vertices.
inline std::vector<Graph> cubic_corpus() {
  std::vector<Graph> out;
  for (int n : {4, 6, 8, 10, 12}) {
    for (int i = 0; i < 10; ++i) {
      out.push_back(Graph::random_regular(n, 3, 1000 * static_cast<std::uint64_t>(n) + i));
    }
  }
  return out;
}

// P0 interpolating random values bounded away from zero on {+-1}^n, so
// {P0 = 0, x_i^2 = 1} has no solution.
inline Polynomial rootless_cube_poly(std::size_t n, std::uint64_t seed) {
  CounterRng rng(seed);
  std::vector<double> table(std::size_t{1} << n);
  for (auto& v : table) {
    double mag = 0.25 + 2.75 * static_cast<double>(rng() % 1000) / 1000.0;
    v = (rng() & 1U) ? mag : -mag;
  }
  return interpolate_multilinear(n, table);
}

inline PolynomialSystem cube_constraints(std::size_t n) {
  PolynomialSystem s(n);
  for (std::uint32_t i = 0; i < n; ++i) s.equalities.push_back(var(n, i) * var(n, i) - cst(n, 1.0));
  return s;
}

// {x_i^2 = 1, <a, x> = <a, s>} for a cube point s: satisfiable.
inline PolynomialSystem feasible_bounded_system(std::size_t n, std::uint64_t seed) {
  CounterRng rng(seed);
  PolynomialSystem sys = cube_constraints(n);
  auto a = gaussian_vector(rng, n);
  Polynomial l = Polynomial::linear_form(a);
  double rhs = 0.0;
  for (std::size_t i = 0; i < n; ++i) rhs += a[i] * ((rng() & 1U) ? 1.0 : -1.0);
  sys.equalities.push_back(l - cst(n, rhs));
  return sys;
}

// Degree-2 refutable: either {sum_i x_i^2 + c = 0} with c > 0, or the cube
// with <a, x> = c where c^2 > n |a|^2 >= <a, x>^2.
inline PolynomialSystem refutable_bounded_system(std::size_t n, std::uint64_t seed) {
  CounterRng rng(seed);
  if (seed % 2 == 0) {
    PolynomialSystem sys(n);
    Polynomial p = cst(n, 0.5 + static_cast<double>(rng() % 100) / 50.0);
    for (std::uint32_t i = 0; i < n; ++i) p += (1.0 + static_cast<double>(rng() % 3)) * var(n, i) * var(n, i);
    sys.equalities.push_back(p);
    return sys;
  }
  PolynomialSystem sys = cube_constraints(n);
  auto a = gaussian_vector(rng, n);
  double norm = 0.0;
  for (double v : a) norm += v * v;
  const double c = 1.5 * std::sqrt(static_cast<double>(n) * norm);
  sys.equalities.push_back(Polynomial::linear_form(a) - cst(n, c));
  return sys;
}

// Variables u_0..u_{k-1}, v_0..v_{k-1} on unit spheres with a random quartic
// objective: a source of solver-produced degree-4 pseudoexpectations.
inline PolynomialSystem paired_sphere_system(std::size_t k, std::uint64_t seed) {
  const std::size_t n = 2 * k;
  CounterRng rng(seed);
  PolynomialSystem sys(n);
  Polynomial su = cst(n, -1.0), sv = cst(n, -1.0);
  for (std::uint32_t i = 0; i < k; ++i) {
    su += var(n, i) * var(n, i);
    sv += var(n, static_cast<std::uint32_t>(k + i)) * var(n, static_cast<std::uint32_t>(k + i));
  }
  sys.equalities = {su, sv};
  sys.objective = random_poly(n, 4, 12, rng);
  return sys;
}

}  // namespace sos::test
