// Random Lévy triplets shared by the unit and acceptance tests.
#pragma once

#include "momentforge/levy.hpp"
#include "oracles.hpp"

namespace fixture {

using momentforge::AtomicMeasure;
using momentforge::Atom;
using momentforge::LevyTriplet;
using momentforge::SymMatrix;

/// Sigma = G^T G with G random, so off-diagonal entries are generic.
template <class S>
SymMatrix<S> random_covariance(oracle::Rng& rng, std::size_t n, double scale) {
  std::vector<double> g(n * n);
  for (auto& x : g) x = oracle::uniform_real(rng, -1.0, 1.0);
  SymMatrix<S> sigma(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      double acc = 0;
      for (std::size_t r = 0; r < n; ++r) acc += g[r * n + i] * g[r * n + j];
      sigma.set(i, j, S(scale * acc));
    }
  return sigma;
}

/// Triplet with up to `max_atoms` jump atoms away from the origin, a mix of
/// atoms inside and outside the unit ball.
inline LevyTriplet<double> random_triplet(oracle::Rng& rng, std::size_t n, std::size_t max_atoms, double jump = 1.5) {
  std::vector<double> b(n);
  for (auto& x : b) x = oracle::uniform_real(rng, -1.0, 1.0);
  std::vector<Atom<double>> atoms;
  const auto count = oracle::uniform_int(rng, 0, static_cast<long>(max_atoms));
  for (long k = 0; k < count; ++k) {
    Atom<double> a;
    double norm = 0;
    do {
      a.point.clear();
      norm = 0;
      for (std::size_t i = 0; i < n; ++i) {
        a.point.push_back(oracle::uniform_real(rng, -jump, jump));
        norm += a.point.back() * a.point.back();
      }
    } while (norm < 1e-4);
    a.weight = oracle::uniform_real(rng, 0.05, 1.0);
    atoms.push_back(a);
  }
  return LevyTriplet<double>(n, oracle::uniform_real(rng, -1.0, 1.0), b, random_covariance<double>(rng, n, 0.5),
                             AtomicMeasure<double>(n, atoms));
}

}  // namespace fixture
