#pragma once

#include <cstddef>

#include "semiform/isometry.hpp"

namespace semiform {

// Random instances for property checks. `density` is the chance that an
// off-diagonal coefficient is drawn nonzero.
QuadraticScheme random_scheme(const Semiring& s, std::size_t n, Rng& rng, double density = 0.5);
GramMatrix random_gram(const Semiring& s, std::size_t n, Rng& rng, double density = 0.5);
// Zero diagonal, 0/1 pattern (entries one() or a random nonzero scalar).
GramMatrix random_alternate(const Semiring& s, std::size_t n, Rng& rng, double density = 0.5,
                            bool unit_entries = true);
// Rejection sampling until the form is indecomposable; gives up after many
// attempts and throws.
QuadraticScheme random_indecomposable_scheme(const Semiring& s, std::size_t n, Rng& rng,
                                             double density = 0.6);
GramMatrix random_indecomposable_gram(const Semiring& s, std::size_t n, Rng& rng,
                                      double density = 0.6);

// Random permutation and units drawn from `units` (or the semiring's own
// random units when the candidate set is the solver).
IsometryWitness random_witness(const Semiring& s, std::size_t n, Rng& rng,
                               const UnitCandidates& units);

}  // namespace semiform
