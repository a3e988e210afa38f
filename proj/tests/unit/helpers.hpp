#pragma once

#include <random>
#include <vector>

#include "noonring/ring.hpp"

namespace testing {

/// Random band-limited state: Gaussian momentum coefficients for |k| <= kmax.
inline noonring::Wavefunction random_state(const noonring::RingGrid& g, int kmax, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<noonring::cplx> c(static_cast<std::size_t>(g.size()));
  for (int k = -kmax; k <= kmax; ++k) c[static_cast<std::size_t>(g.slot(k))] = {n(rng), n(rng)};
  auto psi = noonring::from_momentum(g, c);
  psi.normalize();
  return psi;
}

/// Gram-Schmidt on random band-limited states.
inline std::vector<noonring::Wavefunction> random_orthonormal(const noonring::RingGrid& g, int count, int kmax,
                                                              std::mt19937_64& rng) {
  std::vector<noonring::Wavefunction> out;
  while (static_cast<int>(out.size()) < count) {
    auto psi = random_state(g, kmax, rng);
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& q : out) {
        const noonring::cplx c = noonring::inner(q, psi);
        for (int m = 0; m < g.size(); ++m) psi[m] -= c * q[m];
      }
    }
    psi.normalize();
    out.push_back(psi);
  }
  return out;
}

}  // namespace testing
