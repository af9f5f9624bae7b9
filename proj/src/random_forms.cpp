#include "semiform/random_forms.hpp"

#include <algorithm>
#include <numeric>

namespace semiform {

namespace {

bool coin(Rng& rng, double p) { return std::bernoulli_distribution(p)(rng); }

template <typename Make>
auto until_indecomposable(Make make) {
  for (int attempt = 0; attempt < 10000; ++attempt) {
    auto f = make();
    if (is_indecomposable(f) && !(f.rank() == 1 && f.semiring().is_zero(coefficient_matrix(f)[0][0]))) {
      return f;
    }
  }
  throw Error("could not sample an indecomposable form");
}

}  // namespace

QuadraticScheme random_scheme(const Semiring& s, std::size_t n, Rng& rng, double density) {
  Coeffs diag;
  for (std::size_t i = 0; i < n; ++i) diag.push_back(s.random(rng));
  OffMap off;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (coin(rng, density)) off.emplace(std::pair{i, j}, s.random_nonzero(rng));
    }
  }
  return QuadraticScheme(s, std::move(diag), std::move(off));
}

GramMatrix random_gram(const Semiring& s, std::size_t n, Rng& rng, double density) {
  Matrix m = zero_matrix(s, n);
  for (std::size_t i = 0; i < n; ++i) {
    m[i][i] = s.random(rng);
    for (std::size_t j = i + 1; j < n; ++j) {
      if (coin(rng, density)) m[i][j] = m[j][i] = s.random_nonzero(rng);
    }
  }
  return GramMatrix(s, std::move(m));
}

GramMatrix random_alternate(const Semiring& s, std::size_t n, Rng& rng, double density,
                            bool unit_entries) {
  Matrix m = zero_matrix(s, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (coin(rng, density)) m[i][j] = m[j][i] = unit_entries ? s.one() : s.random_nonzero(rng);
    }
  }
  return GramMatrix(s, std::move(m));
}

QuadraticScheme random_indecomposable_scheme(const Semiring& s, std::size_t n, Rng& rng,
                                             double density) {
  return until_indecomposable([&] { return random_scheme(s, n, rng, density); });
}

GramMatrix random_indecomposable_gram(const Semiring& s, std::size_t n, Rng& rng, double density) {
  return until_indecomposable([&] { return random_gram(s, n, rng, density); });
}

IsometryWitness random_witness(const Semiring& s, std::size_t n, Rng& rng,
                               const UnitCandidates& units) {
  IsometryWitness w;
  w.perm.resize(n);
  std::iota(w.perm.begin(), w.perm.end(), std::size_t{0});
  std::shuffle(w.perm.begin(), w.perm.end(), rng);
  for (std::size_t i = 0; i < n; ++i) {
    if (units.uses_solver()) {
      w.units.push_back(s.random_unit(rng));
    } else {
      const auto& pool = units.finite();
      w.units.push_back(pool[std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng)]);
    }
  }
  return w;
}

}  // namespace semiform
