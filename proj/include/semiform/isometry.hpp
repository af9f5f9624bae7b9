#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "semiform/decomposition.hpp"

namespace semiform {

// Base permutation plus unit scalars. Applied to a source form it produces
// the target with target(pi(i), pi(j)) = u_i u_j source(i, j); the linear
// map e_i -> u_i^-1 e_pi(i) is then an isometry from source to target.
struct IsometryWitness {
  std::vector<std::size_t> perm;
  Coeffs units;

  static IsometryWitness identity(const Semiring& s, std::size_t n);
  friend bool operator==(const IsometryWitness&, const IsometryWitness&) = default;
};

// `first` then `second`.
IsometryWitness compose(const Semiring& s, const IsometryWitness& first,
                        const IsometryWitness& second);
IsometryWitness inverse(const Semiring& s, const IsometryWitness& w);
Matrix apply_witness(const Semiring& s, const IsometryWitness& w, const Matrix& source);
Form apply_witness(const IsometryWitness& w, const Form& source);
// 1-based cycle notation without fixed points; "()" for the identity.
std::string cycle_notation(const std::vector<std::size_t>& perm);
// Parses cycle notation for a permutation of 0..n-1.
std::vector<std::size_t> parse_cycles(const std::string& text, std::size_t n);

// Either a finite candidate set or the exact solver for semirings whose
// units form the group (Q,+) (max-plus, supertropical).
class UnitCandidates {
 public:
  static UnitCandidates of(std::vector<Scalar> units);
  static UnitCandidates solver();
  // Finite unit group when known, the solver for log-unit semirings;
  // throws PreconditionError otherwise.
  static UnitCandidates defaults(const Semiring& s);

  bool uses_solver() const { return solver_; }
  const std::vector<Scalar>& finite() const { return units_; }

 private:
  bool solver_ = false;
  std::vector<Scalar> units_;
};

// Equality of forms: entrywise for bilinear forms, as functions for
// quadratic forms (a cross term absorbed by its diagonal terms is inert).
// Over large finite carriers the quadratic comparison is pairwise.
bool same_form(const Form& f1, const Form& f2);

// Lexicographically least witness (perm first, then units in scalar order)
// mapping f1 onto f2 (up to same_form), or nullopt.
std::optional<IsometryWitness> isometry_search(const Form& f1, const Form& f2,
                                               const UnitCandidates& units);
std::optional<IsometryWitness> isometry_search(const Form& f1, const Form& f2);

// Whether the witness permutation maps the blocks of p1 bijectively onto the blocks of p2.
bool maps_blocks(const IsometryWitness& w, const BasePartition& p1, const BasePartition& p2);

struct MultiplicityClass {
  Form representative;           // first component encountered
  std::vector<IndexSet> blocks;  // components in this class
  std::size_t count() const { return blocks.size(); }
};
using MultiplicityMap = std::vector<MultiplicityClass>;

MultiplicityMap multiplicities(const Form& f, const UnitCandidates& units);
bool isometric_by_multiplicity(const Form& f1, const Form& f2, const UnitCandidates& units);

struct LedgerRow {
  Form representative;
  std::size_t in_v = 0, in_w1 = 0, in_w2 = 0;
  std::size_t in_v2 = 0, in_w1_2 = 0, in_w2_2 = 0;
};

struct WittVerdict {
  bool complements_isometric = false;
  IndexSet w2;    // complement of W1 in V
  IndexSet w2_2;  // complement of W1' in V'
  std::vector<LedgerRow> ledger;
};

// Throws PreconditionError when W1/W1' are not unions of components,
// V is not isometric to V', or W1 is not isometric to W1'.
WittVerdict witt_cancel(const Form& v, const Form& v2, const IndexSet& w1, const IndexSet& w1_2,
                        const UnitCandidates& units);

struct OrthogonalGroup {
  std::vector<IsometryWitness> elements;
  // Every element maps each isotypical component onto itself.
  bool preserves_isotypical = true;
};

// All self-isometries; requires rank <= 8 and a finite candidate set.
OrthogonalGroup orthogonal_group(const Form& f, const UnitCandidates& units);

}  // namespace semiform
