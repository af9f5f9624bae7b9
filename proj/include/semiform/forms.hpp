#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include "semiform/free_module.hpp"

namespace semiform {

// Symmetric bilinear form given by its Gram matrix on the ordered base.
class GramMatrix {
 public:
  // Throws PreconditionError("asymmetric at (i,j)") with 1-based indices.
  GramMatrix(Semiring s, Matrix entries);
  static GramMatrix diagonal(const Semiring& s, const Coeffs& diag);
  static GramMatrix zero(const Semiring& s, std::size_t n);

  const Semiring& semiring() const { return semiring_; }
  std::size_t rank() const { return entries_.size(); }
  const Scalar& operator()(std::size_t i, std::size_t j) const { return entries_[i][j]; }
  const Matrix& entries() const { return entries_; }

  friend bool operator==(const GramMatrix& a, const GramMatrix& b) {
    return a.semiring_ == b.semiring_ && a.entries_ == b.entries_;
  }

 private:
  Semiring semiring_;
  Matrix entries_;
};

using OffMap = std::map<std::pair<std::size_t, std::size_t>, Scalar>;

// Quadratic form as a triangular scheme: sum a_i x_i^2 + sum_{i<j} a_ij x_i x_j.
// Only nonzero cross coefficients are stored.
class QuadraticScheme {
 public:
  QuadraticScheme(Semiring s, Coeffs diag, OffMap off = {});
  static QuadraticScheme zero(const Semiring& s, std::size_t n);

  const Semiring& semiring() const { return semiring_; }
  std::size_t rank() const { return diag_.size(); }
  const Scalar& diag(std::size_t i) const { return diag_[i]; }
  const Coeffs& diagonal() const { return diag_; }
  // Cross coefficient for i != j in either order; zero when absent.
  Scalar off(std::size_t i, std::size_t j) const;
  const OffMap& off_entries() const { return off_; }

  friend bool operator==(const QuadraticScheme& a, const QuadraticScheme& b) {
    return a.semiring_ == b.semiring_ && a.diag_ == b.diag_ && a.off_ == b.off_;
  }

 private:
  Semiring semiring_;
  Coeffs diag_;
  OffMap off_;
};

// Not necessarily symmetric bilinear form B with B + B^t = b and B_ii = a_i.
struct Expansion {
  Semiring semiring;
  Matrix entries;
};

using Form = std::variant<GramMatrix, QuadraticScheme>;

const Semiring& form_semiring(const Form& f);
std::size_t form_rank(const Form& f);
bool is_quadratic(const Form& f);

Scalar eval_bilinear(const GramMatrix& b, const Coeffs& x, const Coeffs& y);
Scalar eval_quadratic(const QuadraticScheme& q, const Coeffs& x);
Scalar eval_expansion(const Expansion& e, const Coeffs& x, const Coeffs& y);

struct CheckResult {
  bool holds = true;
  bool exhaustive = false;
  std::size_t checked = 0;
  std::optional<std::pair<Coeffs, Coeffs>> witness;
};

// Checks q(x+y) = q(x) + q(y) + b(x,y). Exhaustive over carrier^n pairs
// when that is at most `exhaustive_limit` pairs, otherwise `samples` random
// pairs drawn from the scaling grid.
CheckResult is_companion(const QuadraticScheme& q, const GramMatrix& b, Rng& rng,
                         std::size_t samples = 500, std::size_t exhaustive_limit = 1u << 20);

GramMatrix balanced_companion(const QuadraticScheme& q);
// Zeros b_ij wherever q is quasilinear on the pair (i, j).
GramMatrix quasiminimal_reduce(const QuadraticScheme& q, const GramMatrix& b);
GramMatrix alternate_part(const GramMatrix& b);
QuadraticScheme norm_form(const GramMatrix& gamma);

// b is balanced for q: b_ii = 2 a_i, and each off entry carries the same
// cross term as q (equal, or both absorbed by the diagonal).
bool is_balanced_for(const QuadraticScheme& q, const GramMatrix& b);

// Per pair (i, j) with i < j: (chi_ij, chi_ji) summing to b_ij.
using SplitChoice = std::map<std::pair<std::size_t, std::size_t>, std::pair<Scalar, Scalar>>;

// Pairs without a split take the triangular choice (b_ij, 0).
Expansion make_expansion(const QuadraticScheme& q, const GramMatrix& b,
                         const SplitChoice& splits = {});

struct FormPredicates {
  bool is_alternate = false;        // bilinear with zero diagonal
  bool is_diagonally_zero = false;  // zero diagonal, either kind
  bool is_anisotropic = false;      // every base vector has a nonzero value
  bool rigid_sufficient = false;    // quadratic and diagonally zero
  bool is_quasilinear_scheme = false;  // quadratic and every cross pair absorbed
};

FormPredicates predicates(const GramMatrix& b);
FormPredicates predicates(const QuadraticScheme& q);

// Coefficient matrix view: Gram entries, or for a scheme the diagonal plus
// the cross coefficient mirrored into both triangles.
Matrix coefficient_matrix(const Form& f);
Form form_from_coefficients(const Form& like, const Matrix& m);

// Restriction to the given base indices, in the given order.
Form restrict_form(const Form& f, const IndexSet& indices);
GramMatrix restrict_form(const GramMatrix& b, const IndexSet& indices);
QuadraticScheme restrict_form(const QuadraticScheme& q, const IndexSet& indices);

// Orthogonal sum: block-diagonal concatenation.
Form orthogonal_sum(const Form& a, const Form& b);

}  // namespace semiform
