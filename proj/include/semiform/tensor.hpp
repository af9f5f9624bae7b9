#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "semiform/forms.hpp"

namespace semiform {

// Base of a tensor product: pairs (i, k) ordered left-major, so (i, k) sits
// at position i * right + k.
struct ProductBase {
  std::size_t left = 0;
  std::size_t right = 0;

  std::size_t size() const { return left * right; }
  std::size_t index(std::size_t i, std::size_t k) const { return i * right + k; }
  std::pair<std::size_t, std::size_t> pair(std::size_t p) const { return {p / right, p % right}; }
  // Positions listed right-major: (0,0), (1,0), ..., (0,1), (1,1), ...
  IndexSet right_major_order() const;
};

Coeffs tensor_vectors(const Semiring& s, const Coeffs& x, const Coeffs& y);
// Kronecker product, left-major.
Matrix kronecker(const Semiring& s, const Matrix& a, const Matrix& b);
GramMatrix tensor_bilinear(const GramMatrix& b1, const GramMatrix& b2);

// Scheme of the quadratic form x -> E(x, x): diagonal E_pp, cross E_pr + E_rp.
QuadraticScheme fold_expansion(const Semiring& s, const Matrix& e);

// gamma tensored with (q, b), b a balanced companion of q, via the
// expansion of (q, b) picked by `splits` (triangular by default).
QuadraticScheme tensor_quadratic(const GramMatrix& gamma, const QuadraticScheme& q,
                                 const GramMatrix& b, const SplitChoice& splits = {});

struct IndependenceReport {
  bool identical = true;
  bool exhaustive = false;
  std::size_t expansions = 0;  // expansions compared against the triangular one
  std::optional<SplitChoice> mismatch;
};

// Folds many expansions of (q, b) and compares each against the triangular
// one. Enumerates every split combination when a finite semiring makes
// that at most `trials` expansions; otherwise draws `trials` random splits.
IndependenceReport expansion_independence_check(const GramMatrix& gamma, const QuadraticScheme& q,
                                                const GramMatrix& b, std::size_t trials, Rng& rng);

// Entrywise scalar multiples and sums.
GramMatrix scale_form(const Scalar& a, const GramMatrix& b);
QuadraticScheme scale_form(const Scalar& a, const QuadraticScheme& q);
GramMatrix add_forms(const GramMatrix& x, const GramMatrix& y);
QuadraticScheme add_forms(const QuadraticScheme& x, const QuadraticScheme& y);

}  // namespace semiform
