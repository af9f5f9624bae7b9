#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "semiform/semiring.hpp"

namespace semiform {

// Raised when vectors, forms or submodules of different ranks are combined.
class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

using Coeffs = std::vector<Scalar>;
using Matrix = std::vector<std::vector<Scalar>>;
// Sorted 0-based base indices.
using IndexSet = std::vector<std::size_t>;

// Finite-rank free module with an ordered base.
class FreeModule {
 public:
  FreeModule(Semiring s, std::size_t rank, std::vector<std::string> labels = {});

  const Semiring& semiring() const { return semiring_; }
  std::size_t rank() const { return rank_; }
  const std::vector<std::string>& labels() const { return labels_; }

  Coeffs zero_vector() const;
  Coeffs base_vector(std::size_t i) const;
  // Validates length and membership of every coefficient.
  void require(const Coeffs& x) const;

 private:
  Semiring semiring_;
  std::size_t rank_;
  std::vector<std::string> labels_;
};

IndexSet support(const Semiring& s, const Coeffs& x);
Coeffs add_vectors(const Semiring& s, const Coeffs& x, const Coeffs& y);
Coeffs scale_vector(const Semiring& s, const Scalar& a, const Coeffs& x);

struct BasicSubmodule {
  std::size_t rank = 0;  // rank of the ambient module
  IndexSet indices;
  friend bool operator==(const BasicSubmodule&, const BasicSubmodule&) = default;
};

// Validates bounds, sorts and deduplicates.
BasicSubmodule make_basic(std::size_t rank, IndexSet indices);

enum class LatticeOp { Meet, Join, Complement, RelativeComplement };

// Complement ignores `other`; RelativeComplement returns other \ w and
// requires w to be contained in other.
BasicSubmodule basic_lattice(LatticeOp op, const BasicSubmodule& w,
                             const std::optional<BasicSubmodule>& other = std::nullopt);

Matrix identity_matrix(const Semiring& s, std::size_t n);
Matrix zero_matrix(const Semiring& s, std::size_t n);
Matrix matrix_product(const Semiring& s, const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& m);

bool is_generalized_permutation(const Semiring& s, const Matrix& m);
// Transposed pattern with inverted units; nullopt if `m` is not a
// generalized permutation matrix.
std::optional<Matrix> generalized_permutation_inverse(const Semiring& s, const Matrix& m);

enum class BaseGuarantee { Guaranteed, NotGuaranteed, Unknown };

BaseGuarantee unique_base_guarantee(const Semiring& s);
std::string to_string(BaseGuarantee g);

struct BaseVerification {
  bool is_base = false;
  bool exhaustive = false;
  bool projectively_standard = false;
  std::size_t combinations = 0;  // coefficient tuples enumerated
  std::size_t targets = 0;       // vectors whose representation was checked
  // First target with no representation (or with several).
  std::optional<Coeffs> witness;
  std::size_t witness_representations = 0;
};

// Every target vector must have exactly one representation in the
// candidates. Finite semirings are checked over the whole carrier; otherwise
// targets have coefficients in `sample` and representations range over the
// sample closed under one addition or multiplication.
BaseVerification verify_base(const FreeModule& module, const std::vector<Coeffs>& candidates,
                             const std::vector<Scalar>& sample = {});

// True when each candidate is a unit multiple of a distinct standard base vector.
bool projectively_standard(const Semiring& s, const std::vector<Coeffs>& candidates);

}  // namespace semiform
