#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include <boost/rational.hpp>
#include <nlohmann/json.hpp>

namespace semiform {

using Rational = boost::rational<std::int64_t>;
using Rng = std::mt19937_64;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when scalars of different semirings meet in one operation.
class SemiringMismatch : public Error {
 public:
  using Error::Error;
};

// Raised when an operation's documented precondition does not hold.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class Scalar;

// Max-plus element; an empty value is -inf, the additive zero.
struct Tropical {
  std::optional<Rational> value;
  friend bool operator==(const Tropical&, const Tropical&) = default;
};

// Supertropical element: a tangible or ghost value over the rationals,
// or the zero (-inf, never ghost).
struct SuperTropical {
  std::optional<Rational> value;
  bool ghost = false;
  friend bool operator==(const SuperTropical&, const SuperTropical&) = default;
};

struct FiniteElement {
  std::uint64_t table = 0;  // fingerprint of the table id
  std::uint32_t index = 0;
  friend bool operator==(const FiniteElement&, const FiniteElement&) = default;
};

struct ProductElement {
  std::vector<Scalar> parts;
  friend bool operator==(const ProductElement& a, const ProductElement& b);
};

class Scalar {
 public:
  using Payload = std::variant<bool, std::uint64_t, Tropical, SuperTropical,
                               FiniteElement, ProductElement>;

  Scalar() = default;
  explicit Scalar(Payload payload) : payload_(std::move(payload)) {}

  const Payload& payload() const { return payload_; }

  template <typename T>
  const T& as() const {
    return std::get<T>(payload_);
  }

  friend bool operator==(const Scalar&, const Scalar&) = default;
  // Total order used only for deterministic containers and tie-breaking.
  friend bool operator<(const Scalar& a, const Scalar& b);

 private:
  Payload payload_{false};
};

inline bool operator==(const ProductElement& a, const ProductElement& b) {
  return a.parts == b.parts;
}

bool operator<(const std::vector<Scalar>& a, const std::vector<Scalar>& b);

enum class SemiringKind { Boolean, Natural, MaxPlus, Supertropical, Finite, Product };

struct SemiringFlags {
  bool antiring = false;        // a+b=0 => a=b=0
  bool entire = false;          // ab=0 => a=0 or b=0
  bool indecomposable = false;  // no idempotents u1,u2 != 0 with u1u2=0, u1+u2=1
  bool nql = false;             // nonzero a,c: some mu with a+mu*c != a
  bool frobenius = false;       // (a+b)^2 = a^2 + b^2
  bool doubling_free = false;   // a+a=0 => a=0
};

namespace detail {
class SemiringImpl;
}

// Immutable handle to a commutative semiring with 0 and 1. Cheap to copy.
class Semiring {
 public:
  static Semiring boolean();
  static Semiring natural();
  static Semiring max_plus();
  static Semiring supertropical();
  // Table ids: "truncN" (0..N, saturating + and *), "chainN" (0..N, max/min),
  // "zN" (integers mod N).
  static Semiring finite(std::string_view table_id);
  static Semiring product(const Semiring& left, const Semiring& right);
  static Semiring from_descriptor(const nlohmann::json& descriptor);

  nlohmann::json descriptor() const;
  const std::string& name() const;
  SemiringKind kind() const;
  const SemiringFlags& flags() const;
  // Factor semirings of a product; empty otherwise.
  std::vector<Semiring> factors() const;

  Scalar zero() const;
  Scalar one() const;
  Scalar add(const Scalar& a, const Scalar& b) const;
  Scalar mul(const Scalar& a, const Scalar& b) const;
  Scalar twice(const Scalar& a) const { return add(a, a); }
  Scalar square(const Scalar& a) const { return mul(a, a); }
  bool is_zero(const Scalar& a) const { return a == zero(); }
  bool is_one(const Scalar& a) const { return a == one(); }

  bool contains(const Scalar& a) const;
  // Throws SemiringMismatch unless `a` belongs to this semiring.
  void require(const Scalar& a) const;

  std::optional<Scalar> try_invert(const Scalar& a) const;
  bool is_unit(const Scalar& a) const { return try_invert(a).has_value(); }

  // Whole carrier for finite semirings.
  std::optional<std::vector<Scalar>> carrier() const;
  // Unit group when it is finite.
  std::optional<std::vector<Scalar>> units() const;

  // Semirings whose unit group is (Q,+) written multiplicatively
  // (max-plus, supertropical). unit_log_ratio(a, b) is log u for the unit u
  // with u*a = b, if one exists; a and b nonzero.
  bool has_log_units() const;
  std::optional<Rational> unit_log_ratio(const Scalar& a, const Scalar& b) const;
  Scalar unit_exp(const Rational& log_value) const;
  // Exponent of a nonzero scalar in log-unit semirings (ghosts included).
  std::optional<Rational> valuation(const Scalar& a) const;

  // Does the form a_eps*x^2 + a_eta*y^2 + beta*x*y agree with
  // a_eps*x^2 + a_eta*y^2 for every x, y in the semiring?
  bool pair_quasilinear(const Scalar& a_eps, const Scalar& a_eta, const Scalar& beta) const;
  bool has_nql() const;

  // Axiom-check sample; always contains 0 and 1.
  std::vector<Scalar> default_sample() const;
  // Scalars used to build test vectors in sampled identity checks.
  std::vector<Scalar> scaling_grid() const;
  // Same, widened so that exponents reach at least +-radius (log-unit
  // semirings and their products); other semirings ignore the radius.
  std::vector<Scalar> scaling_grid(int radius) const;

  Scalar random(Rng& rng) const;
  Scalar random_nonzero(Rng& rng) const;
  Scalar random_unit(Rng& rng) const;
  // Random (c1, c2) with c1 + c2 = beta.
  std::pair<Scalar, Scalar> random_split(const Scalar& beta, Rng& rng) const;
  // All (c1, c2) with c1 + c2 = beta; finite semirings only.
  std::optional<std::vector<std::pair<Scalar, Scalar>>> splits(const Scalar& beta) const;

  std::string format(const Scalar& a) const;
  nlohmann::json to_json(const Scalar& a) const;
  Scalar parse(const nlohmann::json& literal) const;
  Scalar parse(std::string_view literal) const;
  Scalar parse(const char* literal) const { return parse(std::string_view(literal)); }

  friend bool operator==(const Semiring& a, const Semiring& b) { return a.name() == b.name(); }

 private:
  explicit Semiring(std::shared_ptr<const detail::SemiringImpl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const detail::SemiringImpl> impl_;
};

struct AxiomVerdict {
  std::string axiom;
  bool holds = true;
  std::vector<Scalar> witness;  // populated on refutation
};

struct FlagReport {
  std::vector<AxiomVerdict> verdicts;
  std::size_t sample_size = 0;
  bool exhaustive = false;
  // Declared flags contradicted by the check.
  std::vector<std::string> inconsistent;

  const AxiomVerdict& verdict(std::string_view axiom) const;
  bool consistent() const { return inconsistent.empty(); }
};

// Checks the semiring laws and the structural flags over every tuple drawn
// from `sample`. Passing an empty sample uses the full carrier for finite
// semirings and default_sample() otherwise.
FlagReport axioms_check(const Semiring& s, std::vector<Scalar> sample = {});

}  // namespace semiform
