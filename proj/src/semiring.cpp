#include "semiform/semiring.hpp"

#include <algorithm>
#include <charconv>
#include <limits>
#include <regex>
#include <sstream>

namespace semiform {

namespace {

template <typename T>
int compare_values(const T& a, const T& b) {
  if (a < b) return -1;
  if (b < a) return 1;
  return 0;
}

int compare_optional(const std::optional<Rational>& a, const std::optional<Rational>& b) {
  if (!a && !b) return 0;
  if (!a) return -1;
  if (!b) return 1;
  return compare_values(*a, *b);
}

std::string format_rational(const Rational& r) {
  std::ostringstream out;
  out << r.numerator();
  if (r.denominator() != 1) out << '/' << r.denominator();
  return out.str();
}

std::int64_t parse_int(std::string_view text, std::string_view whole) {
  std::int64_t value = 0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (!text.empty() && text.front() == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || first == last) {
    throw ParseError("malformed scalar literal '" + std::string(whole) + "'");
  }
  return value;
}

// Accepts "-inf", "p" and "p/q".
std::optional<Rational> parse_extended_rational(std::string_view text, std::string_view whole) {
  if (text == "-inf") return std::nullopt;
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) return Rational(parse_int(text, whole));
  const auto den = parse_int(text.substr(slash + 1), whole);
  if (den == 0) throw ParseError("zero denominator in '" + std::string(whole) + "'");
  return Rational(parse_int(text.substr(0, slash), whole), den);
}

std::string json_scalar_text(const nlohmann::json& literal) {
  if (literal.is_string()) return literal.get<std::string>();
  if (literal.is_number_integer()) return std::to_string(literal.get<std::int64_t>());
  if (literal.is_number_unsigned()) return std::to_string(literal.get<std::uint64_t>());
  throw ParseError("malformed scalar literal " + literal.dump());
}

std::uint64_t fingerprint(std::string_view text) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace

bool operator<(const Scalar& a, const Scalar& b) {
  const auto& pa = a.payload();
  const auto& pb = b.payload();
  if (pa.index() != pb.index()) return pa.index() < pb.index();
  return std::visit(
      [&](const auto& x) -> bool {
        using T = std::decay_t<decltype(x)>;
        const auto& y = std::get<T>(pb);
        if constexpr (std::is_same_v<T, bool> || std::is_same_v<T, std::uint64_t>) {
          return x < y;
        } else if constexpr (std::is_same_v<T, Tropical>) {
          return compare_optional(x.value, y.value) < 0;
        } else if constexpr (std::is_same_v<T, SuperTropical>) {
          const int c = compare_optional(x.value, y.value);
          return c != 0 ? c < 0 : x.ghost < y.ghost;
        } else if constexpr (std::is_same_v<T, FiniteElement>) {
          return std::tie(x.table, x.index) < std::tie(y.table, y.index);
        } else {
          return x.parts < y.parts;
        }
      },
      pa);
}

bool operator<(const std::vector<Scalar>& a, const std::vector<Scalar>& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(),
                                      [](const Scalar& x, const Scalar& y) { return x < y; });
}

namespace detail {

class SemiringImpl {
 public:
  SemiringImpl(std::string name, SemiringKind kind, SemiringFlags flags)
      : name_(std::move(name)), kind_(kind), flags_(flags) {}
  virtual ~SemiringImpl() = default;

  const std::string& name() const { return name_; }
  SemiringKind kind() const { return kind_; }
  const SemiringFlags& flags() const { return flags_; }

  virtual nlohmann::json descriptor() const { return {{"kind", name_}}; }
  virtual std::vector<Semiring> factors() const { return {}; }
  virtual Scalar zero() const = 0;
  virtual Scalar one() const = 0;
  virtual Scalar add(const Scalar& a, const Scalar& b) const = 0;
  virtual Scalar mul(const Scalar& a, const Scalar& b) const = 0;
  virtual bool contains(const Scalar& a) const = 0;
  virtual std::optional<Scalar> try_invert(const Scalar& a) const = 0;
  virtual std::optional<std::vector<Scalar>> carrier() const { return std::nullopt; }

  virtual std::optional<std::vector<Scalar>> units() const {
    auto all = carrier();
    if (!all) return std::nullopt;
    std::vector<Scalar> out;
    for (const auto& a : *all) {
      if (try_invert(a)) out.push_back(a);
    }
    return out;
  }

  virtual bool has_log_units() const { return false; }
  virtual std::optional<Rational> unit_log_ratio(const Scalar&, const Scalar&) const {
    return std::nullopt;
  }
  virtual Scalar unit_exp(const Rational&) const {
    throw Error("semiring " + name_ + " has no logarithmic unit group");
  }
  virtual std::optional<Rational> valuation(const Scalar&) const { return std::nullopt; }

  virtual bool pair_quasilinear(const Scalar& a, const Scalar& b, const Scalar& beta) const {
    auto all = carrier();
    if (!all) return beta == zero();
    for (const auto& x : *all) {
      for (const auto& y : *all) {
        const Scalar base = add(mul(a, mul(x, x)), mul(b, mul(y, y)));
        if (add(base, mul(beta, mul(x, y))) != base) return false;
      }
    }
    return true;
  }

  virtual std::vector<Scalar> default_sample() const { return *carrier(); }
  virtual std::vector<Scalar> scaling_grid() const { return *carrier(); }
  virtual std::vector<Scalar> scaling_grid(int) const { return scaling_grid(); }

  virtual Scalar random(Rng& rng) const {
    const auto all = *carrier();
    return all[std::uniform_int_distribution<std::size_t>(0, all.size() - 1)(rng)];
  }

  virtual Scalar random_unit(Rng& rng) const {
    const auto all = units();
    if (!all || all->empty()) throw Error("semiring " + name_ + " cannot sample units");
    return (*all)[std::uniform_int_distribution<std::size_t>(0, all->size() - 1)(rng)];
  }

  virtual std::optional<std::vector<std::pair<Scalar, Scalar>>> splits(const Scalar& beta) const {
    auto all = carrier();
    if (!all) return std::nullopt;
    std::vector<std::pair<Scalar, Scalar>> out;
    for (const auto& x : *all) {
      for (const auto& y : *all) {
        if (add(x, y) == beta) out.emplace_back(x, y);
      }
    }
    return out;
  }

  virtual std::pair<Scalar, Scalar> random_split(const Scalar& beta, Rng& rng) const {
    const auto options = *splits(beta);
    return options[std::uniform_int_distribution<std::size_t>(0, options.size() - 1)(rng)];
  }

  virtual std::string format(const Scalar& a) const = 0;
  virtual nlohmann::json to_json(const Scalar& a) const { return format(a); }
  virtual Scalar parse(const nlohmann::json& literal) const = 0;

 private:
  std::string name_;
  SemiringKind kind_;
  SemiringFlags flags_;
};

namespace {

class BooleanImpl final : public SemiringImpl {
 public:
  BooleanImpl()
      : SemiringImpl("bool", SemiringKind::Boolean,
                     {.antiring = true, .entire = true, .indecomposable = true, .nql = false,
                      .frobenius = true, .doubling_free = true}) {}

  Scalar zero() const override { return Scalar(false); }
  Scalar one() const override { return Scalar(true); }
  Scalar add(const Scalar& a, const Scalar& b) const override {
    return Scalar(a.as<bool>() || b.as<bool>());
  }
  Scalar mul(const Scalar& a, const Scalar& b) const override {
    return Scalar(a.as<bool>() && b.as<bool>());
  }
  bool contains(const Scalar& a) const override {
    return std::holds_alternative<bool>(a.payload());
  }
  std::optional<Scalar> try_invert(const Scalar& a) const override {
    if (a.as<bool>()) return a;
    return std::nullopt;
  }
  std::optional<std::vector<Scalar>> carrier() const override {
    return std::vector<Scalar>{zero(), one()};
  }
  std::string format(const Scalar& a) const override { return a.as<bool>() ? "1" : "0"; }
  nlohmann::json to_json(const Scalar& a) const override { return a.as<bool>() ? 1 : 0; }
  Scalar parse(const nlohmann::json& literal) const override {
    if (literal.is_boolean()) return Scalar(literal.get<bool>());
    const auto text = json_scalar_text(literal);
    if (text == "0") return zero();
    if (text == "1") return one();
    throw ParseError("malformed boolean literal '" + text + "'");
  }
};

class NaturalImpl final : public SemiringImpl {
 public:
  NaturalImpl()
      : SemiringImpl("nat", SemiringKind::Natural,
                     {.antiring = true, .entire = true, .indecomposable = true, .nql = true,
                      .frobenius = false, .doubling_free = true}) {}

  Scalar zero() const override { return Scalar(std::uint64_t{0}); }
  Scalar one() const override { return Scalar(std::uint64_t{1}); }
  Scalar add(const Scalar& a, const Scalar& b) const override {
    std::uint64_t out = 0;
    if (__builtin_add_overflow(a.as<std::uint64_t>(), b.as<std::uint64_t>(), &out)) {
      throw std::overflow_error("natural number addition overflow");
    }
    return Scalar(out);
  }
  Scalar mul(const Scalar& a, const Scalar& b) const override {
    std::uint64_t out = 0;
    if (__builtin_mul_overflow(a.as<std::uint64_t>(), b.as<std::uint64_t>(), &out)) {
      throw std::overflow_error("natural number multiplication overflow");
    }
    return Scalar(out);
  }
  bool contains(const Scalar& a) const override {
    return std::holds_alternative<std::uint64_t>(a.payload());
  }
  std::optional<Scalar> try_invert(const Scalar& a) const override {
    if (a.as<std::uint64_t>() == 1) return a;
    return std::nullopt;
  }
  std::optional<std::vector<Scalar>> units() const override { return std::vector{one()}; }
  std::vector<Scalar> default_sample() const override { return range(0, 6); }
  std::vector<Scalar> scaling_grid() const override { return range(0, 3); }
  Scalar random(Rng& rng) const override {
    return Scalar(std::uniform_int_distribution<std::uint64_t>(0, 4)(rng));
  }
  Scalar random_unit(Rng&) const override { return one(); }
  std::pair<Scalar, Scalar> random_split(const Scalar& beta, Rng& rng) const override {
    const auto total = beta.as<std::uint64_t>();
    const auto left = std::uniform_int_distribution<std::uint64_t>(0, total)(rng);
    return {Scalar(left), Scalar(total - left)};
  }
  std::string format(const Scalar& a) const override {
    return std::to_string(a.as<std::uint64_t>());
  }
  nlohmann::json to_json(const Scalar& a) const override { return a.as<std::uint64_t>(); }
  Scalar parse(const nlohmann::json& literal) const override {
    const auto text = json_scalar_text(literal);
    if (text.empty() || text.front() == '-') {
      throw ParseError("malformed natural number literal '" + text + "'");
    }
    return Scalar(static_cast<std::uint64_t>(parse_int(text, text)));
  }

 private:
  static std::vector<Scalar> range(std::uint64_t lo, std::uint64_t hi) {
    std::vector<Scalar> out;
    for (auto v = lo; v <= hi; ++v) out.emplace_back(v);
    return out;
  }
};

// Values on a half-integer grid, used for sampling vectors over the
// rational value group.
std::vector<Rational> half_grid(int lo, int hi) {
  std::vector<Rational> out;
  for (int twice = 2 * lo; twice <= 2 * hi; ++twice) out.emplace_back(twice, 2);
  return out;
}

class MaxPlusImpl final : public SemiringImpl {
 public:
  MaxPlusImpl()
      : SemiringImpl("maxplus", SemiringKind::MaxPlus,
                     {.antiring = true, .entire = true, .indecomposable = true, .nql = true,
                      .frobenius = true, .doubling_free = true}) {}

  static Scalar make(std::optional<Rational> v) { return Scalar(Tropical{v}); }

  Scalar zero() const override { return make(std::nullopt); }
  Scalar one() const override { return make(Rational(0)); }
  Scalar add(const Scalar& a, const Scalar& b) const override {
    const auto& x = a.as<Tropical>().value;
    const auto& y = b.as<Tropical>().value;
    if (!x) return b;
    if (!y) return a;
    return make(std::max(*x, *y));
  }
  Scalar mul(const Scalar& a, const Scalar& b) const override {
    const auto& x = a.as<Tropical>().value;
    const auto& y = b.as<Tropical>().value;
    if (!x || !y) return zero();
    return make(*x + *y);
  }
  bool contains(const Scalar& a) const override {
    return std::holds_alternative<Tropical>(a.payload());
  }
  std::optional<Scalar> try_invert(const Scalar& a) const override {
    const auto& x = a.as<Tropical>().value;
    if (!x) return std::nullopt;
    return make(-*x);
  }
  bool has_log_units() const override { return true; }
  std::optional<Rational> unit_log_ratio(const Scalar& a, const Scalar& b) const override {
    const auto& x = a.as<Tropical>().value;
    const auto& y = b.as<Tropical>().value;
    if (!x || !y) return std::nullopt;
    return *y - *x;
  }
  Scalar unit_exp(const Rational& v) const override { return make(v); }
  std::optional<Rational> valuation(const Scalar& a) const override {
    return a.as<Tropical>().value;
  }

  // 2*beta <= a + b in classical arithmetic; a zero cross term is always absorbed.
  bool pair_quasilinear(const Scalar& a, const Scalar& b, const Scalar& beta) const override {
    const auto& c = beta.as<Tropical>().value;
    if (!c) return true;
    const auto& x = a.as<Tropical>().value;
    const auto& y = b.as<Tropical>().value;
    if (!x || !y) return false;
    return Rational(2) * *c <= *x + *y;
  }

  std::vector<Scalar> default_sample() const override {
    std::vector<Scalar> out{zero()};
    for (int v = -3; v <= 3; ++v) out.push_back(make(Rational(v)));
    return out;
  }
  std::vector<Scalar> scaling_grid() const override { return scaling_grid(6); }
  std::vector<Scalar> scaling_grid(int radius) const override {
    std::vector<Scalar> out{zero()};
    for (const auto& v : half_grid(-radius, radius)) out.push_back(make(v));
    return out;
  }
  Scalar random(Rng& rng) const override {
    if (std::uniform_int_distribution<int>(0, 4)(rng) == 0) return zero();
    return make(Rational(std::uniform_int_distribution<int>(-4, 4)(rng)));
  }
  Scalar random_unit(Rng& rng) const override {
    return make(Rational(std::uniform_int_distribution<int>(-3, 3)(rng)));
  }
  std::pair<Scalar, Scalar> random_split(const Scalar& beta, Rng& rng) const override {
    const auto& v = beta.as<Tropical>().value;
    if (!v) return {zero(), zero()};
    const int drop = std::uniform_int_distribution<int>(-1, 3)(rng);
    const Scalar lower = drop < 0 ? zero() : make(*v - Rational(drop));
    if (std::uniform_int_distribution<int>(0, 1)(rng) == 0) return {beta, lower};
    return {lower, beta};
  }
  std::string format(const Scalar& a) const override {
    const auto& v = a.as<Tropical>().value;
    return v ? format_rational(*v) : "-inf";
  }
  Scalar parse(const nlohmann::json& literal) const override {
    const auto text = json_scalar_text(literal);
    return make(parse_extended_rational(text, text));
  }
};

class SupertropicalImpl final : public SemiringImpl {
 public:
  SupertropicalImpl()
      : SemiringImpl("supertropical", SemiringKind::Supertropical,
                     {.antiring = true, .entire = true, .indecomposable = true, .nql = true,
                      .frobenius = true, .doubling_free = true}) {}

  static Scalar make(std::optional<Rational> v, bool ghost) {
    return Scalar(SuperTropical{v, v.has_value() && ghost});
  }

  Scalar zero() const override { return make(std::nullopt, false); }
  Scalar one() const override { return make(Rational(0), false); }
  // Larger value wins; equal values add to a ghost.
  Scalar add(const Scalar& a, const Scalar& b) const override {
    const auto& x = a.as<SuperTropical>();
    const auto& y = b.as<SuperTropical>();
    if (!x.value) return b;
    if (!y.value) return a;
    if (*x.value > *y.value) return a;
    if (*y.value > *x.value) return b;
    return make(x.value, true);
  }
  Scalar mul(const Scalar& a, const Scalar& b) const override {
    const auto& x = a.as<SuperTropical>();
    const auto& y = b.as<SuperTropical>();
    if (!x.value || !y.value) return zero();
    return make(*x.value + *y.value, x.ghost || y.ghost);
  }
  bool contains(const Scalar& a) const override {
    const auto* x = std::get_if<SuperTropical>(&a.payload());
    return x != nullptr && (x->value.has_value() || !x->ghost);
  }
  std::optional<Scalar> try_invert(const Scalar& a) const override {
    const auto& x = a.as<SuperTropical>();
    if (!x.value || x.ghost) return std::nullopt;
    return make(-*x.value, false);
  }
  bool has_log_units() const override { return true; }
  std::optional<Rational> unit_log_ratio(const Scalar& a, const Scalar& b) const override {
    const auto& x = a.as<SuperTropical>();
    const auto& y = b.as<SuperTropical>();
    if (!x.value || !y.value || x.ghost != y.ghost) return std::nullopt;
    return *y.value - *x.value;
  }
  Scalar unit_exp(const Rational& v) const override { return make(v, false); }
  std::optional<Rational> valuation(const Scalar& a) const override {
    return a.as<SuperTropical>().value;
  }

  // Dominance rule on ghost values (the underlying rationals).
  bool pair_quasilinear(const Scalar& a, const Scalar& b, const Scalar& beta) const override {
    const auto& c = beta.as<SuperTropical>().value;
    if (!c) return true;
    const auto& x = a.as<SuperTropical>().value;
    const auto& y = b.as<SuperTropical>().value;
    if (!x || !y) return false;
    return Rational(2) * *c <= *x + *y;
  }

  std::vector<Scalar> default_sample() const override {
    std::vector<Scalar> out{zero()};
    for (int v = -2; v <= 2; ++v) out.push_back(make(Rational(v), false));
    for (int v = -2; v <= 2; ++v) out.push_back(make(Rational(v), true));
    return out;
  }
  std::vector<Scalar> scaling_grid() const override { return scaling_grid(6); }
  std::vector<Scalar> scaling_grid(int radius) const override {
    std::vector<Scalar> out{zero()};
    for (const auto& v : half_grid(-radius, radius)) out.push_back(make(v, false));
    for (int v = -2; v <= 2; ++v) out.push_back(make(Rational(v), true));
    return out;
  }
  Scalar random(Rng& rng) const override {
    if (std::uniform_int_distribution<int>(0, 4)(rng) == 0) return zero();
    const Rational v(std::uniform_int_distribution<int>(-4, 4)(rng));
    return make(v, std::uniform_int_distribution<int>(0, 3)(rng) == 0);
  }
  Scalar random_unit(Rng& rng) const override {
    return make(Rational(std::uniform_int_distribution<int>(-3, 3)(rng)), false);
  }
  std::pair<Scalar, Scalar> random_split(const Scalar& beta, Rng& rng) const override {
    const auto& b = beta.as<SuperTropical>();
    if (!b.value) return {zero(), zero()};
    std::pair<Scalar, Scalar> out;
    const int drop = std::uniform_int_distribution<int>(-1, 3)(rng);
    if (b.ghost && std::uniform_int_distribution<int>(0, 2)(rng) == 0) {
      out = {make(b.value, false), make(b.value, false)};
    } else if (b.ghost) {
      // a ghost absorbs anything of equal or smaller value
      const Scalar lower = drop < 0 ? zero()
                                    : make(*b.value - Rational(drop),
                                           std::uniform_int_distribution<int>(0, 1)(rng) == 0);
      out = {beta, lower};
    } else {
      const Scalar lower = drop <= 0 ? zero()
                                     : make(*b.value - Rational(drop),
                                            std::uniform_int_distribution<int>(0, 1)(rng) == 0);
      out = {beta, lower};
    }
    if (std::uniform_int_distribution<int>(0, 1)(rng) == 0) std::swap(out.first, out.second);
    return out;
  }
  std::string format(const Scalar& a) const override {
    const auto& x = a.as<SuperTropical>();
    if (!x.value) return "-inf";
    return format_rational(*x.value) + (x.ghost ? "g" : "");
  }
  Scalar parse(const nlohmann::json& literal) const override {
    auto text = json_scalar_text(literal);
    bool ghost = false;
    if (!text.empty() && text.back() == 'g') {
      ghost = true;
      text.pop_back();
    }
    auto value = parse_extended_rational(text, text);
    if (!value && ghost) throw ParseError("the zero has no ghost: '" + text + "g'");
    return make(value, ghost);
  }
};

class FiniteImpl final : public SemiringImpl {
 public:
  FiniteImpl(std::string id, std::vector<std::string> labels, std::vector<std::uint32_t> add,
             std::vector<std::uint32_t> mul, std::uint32_t one, SemiringFlags flags)
      : SemiringImpl("finite:" + id, SemiringKind::Finite, flags),
        table_(fingerprint(id)),
        labels_(std::move(labels)),
        add_(std::move(add)),
        mul_(std::move(mul)),
        one_(one) {}

  Scalar element(std::uint32_t i) const { return Scalar(FiniteElement{table_, i}); }
  std::size_t size() const { return labels_.size(); }

  Scalar zero() const override { return element(0); }
  Scalar one() const override { return element(one_); }
  Scalar add(const Scalar& a, const Scalar& b) const override {
    return element(add_[index(a) * size() + index(b)]);
  }
  Scalar mul(const Scalar& a, const Scalar& b) const override {
    return element(mul_[index(a) * size() + index(b)]);
  }
  bool contains(const Scalar& a) const override {
    const auto* x = std::get_if<FiniteElement>(&a.payload());
    return x != nullptr && x->table == table_ && x->index < size();
  }
  std::optional<Scalar> try_invert(const Scalar& a) const override {
    for (std::uint32_t i = 0; i < size(); ++i) {
      if (mul_[index(a) * size() + i] == one_) return element(i);
    }
    return std::nullopt;
  }
  std::optional<std::vector<Scalar>> carrier() const override {
    std::vector<Scalar> out;
    for (std::uint32_t i = 0; i < size(); ++i) out.push_back(element(i));
    return out;
  }
  std::string format(const Scalar& a) const override { return labels_[index(a)]; }
  Scalar parse(const nlohmann::json& literal) const override {
    const auto text = json_scalar_text(literal);
    for (std::uint32_t i = 0; i < size(); ++i) {
      if (labels_[i] == text) return element(i);
    }
    throw ParseError("'" + text + "' is not an element of " + name());
  }

 private:
  static std::size_t index(const Scalar& a) { return a.as<FiniteElement>().index; }

  std::uint64_t table_;
  std::vector<std::string> labels_;
  std::vector<std::uint32_t> add_;
  std::vector<std::uint32_t> mul_;
  std::uint32_t one_;
};

std::shared_ptr<const FiniteImpl> make_finite(std::string_view id) {
  static const std::regex pattern(R"((trunc|chain|z)([0-9]+))");
  std::cmatch match;
  const std::string text(id);
  if (!std::regex_match(text.c_str(), match, pattern)) {
    throw ParseError("unknown finite semiring table '" + text + "'");
  }
  const std::string family = match[1];
  const int n = std::stoi(match[2]);
  if (n < 1 || n > 32 || (family == "z" && n < 2)) {
    throw ParseError("finite semiring table size out of range: '" + text + "'");
  }
  const std::uint32_t size = family == "z" ? n : n + 1;
  std::vector<std::string> labels;
  std::vector<std::uint32_t> add(size * size), mul(size * size);
  for (std::uint32_t i = 0; i < size; ++i) labels.push_back(std::to_string(i));
  std::uint32_t one = 1;
  SemiringFlags flags;
  const auto cap = static_cast<std::uint32_t>(n);
  for (std::uint32_t a = 0; a < size; ++a) {
    for (std::uint32_t b = 0; b < size; ++b) {
      std::uint32_t s = 0, p = 0;
      if (family == "trunc") {
        s = std::min(a + b, cap);
        p = std::min(a * b, cap);
      } else if (family == "chain") {
        s = std::max(a, b);
        p = std::min(a, b);
      } else {
        s = (a + b) % size;
        p = (a * b) % size;
      }
      add[a * size + b] = s;
      mul[a * size + b] = p;
    }
  }
  if (family == "trunc") {
    flags = {.antiring = true, .entire = true, .indecomposable = true, .nql = false,
             .frobenius = n <= 2, .doubling_free = true};
  } else if (family == "chain") {
    one = cap;
    flags = {.antiring = true, .entire = true, .indecomposable = true, .nql = false,
             .frobenius = true, .doubling_free = true};
  } else {
    bool prime = n >= 2;
    for (int d = 2; d * d <= n; ++d) prime = prime && n % d != 0;
    int m = n;
    int p = 2;
    while (m % p != 0) ++p;
    while (m % p == 0) m /= p;
    flags = {.antiring = false, .entire = prime, .indecomposable = m == 1, .nql = true,
             .frobenius = n == 2, .doubling_free = n % 2 == 1};
  }
  return std::make_shared<FiniteImpl>(text, std::move(labels), std::move(add), std::move(mul), one,
                                      flags);
}

std::vector<Scalar> cartesian(const std::vector<Scalar>& left, const std::vector<Scalar>& right) {
  std::vector<Scalar> out;
  for (const auto& a : left) {
    for (const auto& b : right) out.emplace_back(ProductElement{{a, b}});
  }
  return out;
}

class ProductImpl final : public SemiringImpl {
 public:
  ProductImpl(Semiring left, Semiring right)
      : SemiringImpl("product(" + left.name() + "," + right.name() + ")", SemiringKind::Product,
                     {.antiring = left.flags().antiring && right.flags().antiring,
                      .entire = false,
                      .indecomposable = false,
                      .nql = left.flags().nql && right.flags().nql,
                      .frobenius = left.flags().frobenius && right.flags().frobenius,
                      .doubling_free = left.flags().doubling_free && right.flags().doubling_free}),
        left_(std::move(left)),
        right_(std::move(right)) {}

  nlohmann::json descriptor() const override {
    return {{"kind", "product"}, {"factors", {left_.descriptor(), right_.descriptor()}}};
  }
  std::vector<Semiring> factors() const override { return {left_, right_}; }

  Scalar make(Scalar a, Scalar b) const { return Scalar(ProductElement{{std::move(a), std::move(b)}}); }
  const Scalar& part(const Scalar& a, int i) const { return a.as<ProductElement>().parts[i]; }

  Scalar zero() const override { return make(left_.zero(), right_.zero()); }
  Scalar one() const override { return make(left_.one(), right_.one()); }
  Scalar add(const Scalar& a, const Scalar& b) const override {
    return make(left_.add(part(a, 0), part(b, 0)), right_.add(part(a, 1), part(b, 1)));
  }
  Scalar mul(const Scalar& a, const Scalar& b) const override {
    return make(left_.mul(part(a, 0), part(b, 0)), right_.mul(part(a, 1), part(b, 1)));
  }
  bool contains(const Scalar& a) const override {
    const auto* x = std::get_if<ProductElement>(&a.payload());
    return x != nullptr && x->parts.size() == 2 && left_.contains(x->parts[0]) &&
           right_.contains(x->parts[1]);
  }
  std::optional<Scalar> try_invert(const Scalar& a) const override {
    auto l = left_.try_invert(part(a, 0));
    auto r = right_.try_invert(part(a, 1));
    if (!l || !r) return std::nullopt;
    return make(*l, *r);
  }
  std::optional<std::vector<Scalar>> carrier() const override {
    auto l = left_.carrier();
    auto r = right_.carrier();
    if (!l || !r) return std::nullopt;
    return cartesian(*l, *r);
  }
  std::optional<std::vector<Scalar>> units() const override {
    auto l = left_.units();
    auto r = right_.units();
    if (!l || !r) return std::nullopt;
    return cartesian(*l, *r);
  }
  bool pair_quasilinear(const Scalar& a, const Scalar& b, const Scalar& beta) const override {
    return left_.pair_quasilinear(part(a, 0), part(b, 0), part(beta, 0)) &&
           right_.pair_quasilinear(part(a, 1), part(b, 1), part(beta, 1));
  }
  std::vector<Scalar> default_sample() const override {
    return cartesian(left_.default_sample(), right_.default_sample());
  }
  std::vector<Scalar> scaling_grid() const override {
    return cartesian(left_.scaling_grid(), right_.scaling_grid());
  }
  std::vector<Scalar> scaling_grid(int radius) const override {
    return cartesian(left_.scaling_grid(radius), right_.scaling_grid(radius));
  }
  Scalar random(Rng& rng) const override {
    auto l = left_.random(rng);
    return make(std::move(l), right_.random(rng));
  }
  Scalar random_unit(Rng& rng) const override {
    auto l = left_.random_unit(rng);
    return make(std::move(l), right_.random_unit(rng));
  }
  std::optional<std::vector<std::pair<Scalar, Scalar>>> splits(const Scalar& beta) const override {
    auto l = left_.splits(part(beta, 0));
    auto r = right_.splits(part(beta, 1));
    if (!l || !r) return std::nullopt;
    std::vector<std::pair<Scalar, Scalar>> out;
    for (const auto& [a1, a2] : *l) {
      for (const auto& [b1, b2] : *r) out.emplace_back(make(a1, b1), make(a2, b2));
    }
    return out;
  }
  std::pair<Scalar, Scalar> random_split(const Scalar& beta, Rng& rng) const override {
    auto [a1, a2] = left_.random_split(part(beta, 0), rng);
    auto [b1, b2] = right_.random_split(part(beta, 1), rng);
    return {make(a1, b1), make(a2, b2)};
  }
  std::string format(const Scalar& a) const override {
    return "(" + left_.format(part(a, 0)) + "," + right_.format(part(a, 1)) + ")";
  }
  nlohmann::json to_json(const Scalar& a) const override {
    return nlohmann::json::array({left_.to_json(part(a, 0)), right_.to_json(part(a, 1))});
  }
  Scalar parse(const nlohmann::json& literal) const override {
    if (literal.is_string()) {
      // "(a,b)" as printed by format(); the split is at the top-level comma.
      const auto text = literal.get<std::string>();
      int depth = 0;
      for (std::size_t i = 1; text.size() > 2 && text.front() == '(' && text.back() == ')' &&
                              i + 1 < text.size();
           ++i) {
        if (text[i] == '(') ++depth;
        if (text[i] == ')') --depth;
        if (text[i] == ',' && depth == 0) {
          return make(left_.parse(nlohmann::json(text.substr(1, i - 1))),
                      right_.parse(nlohmann::json(text.substr(i + 1, text.size() - i - 2))));
        }
      }
    }
    if (!literal.is_array() || literal.size() != 2) {
      throw ParseError("product scalar must be a two-element array, got " + literal.dump());
    }
    return make(left_.parse(literal[0]), right_.parse(literal[1]));
  }

 private:
  Semiring left_;
  Semiring right_;
};

}  // namespace
}  // namespace detail

Semiring Semiring::boolean() {
  static const auto impl = std::make_shared<const detail::BooleanImpl>();
  return Semiring(impl);
}

Semiring Semiring::natural() {
  static const auto impl = std::make_shared<const detail::NaturalImpl>();
  return Semiring(impl);
}

Semiring Semiring::max_plus() {
  static const auto impl = std::make_shared<const detail::MaxPlusImpl>();
  return Semiring(impl);
}

Semiring Semiring::supertropical() {
  static const auto impl = std::make_shared<const detail::SupertropicalImpl>();
  return Semiring(impl);
}

Semiring Semiring::finite(std::string_view table_id) {
  return Semiring(detail::make_finite(table_id));
}

Semiring Semiring::product(const Semiring& left, const Semiring& right) {
  return Semiring(std::make_shared<const detail::ProductImpl>(left, right));
}

Semiring Semiring::from_descriptor(const nlohmann::json& descriptor) {
  if (descriptor.is_string()) return from_descriptor(nlohmann::json{{"kind", descriptor}});
  if (!descriptor.is_object() || !descriptor.contains("kind") || !descriptor["kind"].is_string()) {
    throw ParseError("semiring descriptor needs a string 'kind': " + descriptor.dump());
  }
  const auto kind = descriptor["kind"].get<std::string>();
  if (kind == "bool") return boolean();
  if (kind == "nat") return natural();
  if (kind == "maxplus") return max_plus();
  if (kind == "supertropical") return supertropical();
  if (kind.rfind("finite:", 0) == 0) return finite(std::string_view(kind).substr(7));
  if (kind == "product") {
    const auto it = descriptor.find("factors");
    if (it == descriptor.end() || !it->is_array() || it->size() != 2) {
      throw ParseError("product semiring needs exactly two 'factors'");
    }
    return product(from_descriptor((*it)[0]), from_descriptor((*it)[1]));
  }
  throw ParseError("unknown semiring kind '" + kind + "'");
}

nlohmann::json Semiring::descriptor() const { return impl_->descriptor(); }
const std::string& Semiring::name() const { return impl_->name(); }
SemiringKind Semiring::kind() const { return impl_->kind(); }
const SemiringFlags& Semiring::flags() const { return impl_->flags(); }
std::vector<Semiring> Semiring::factors() const { return impl_->factors(); }
Scalar Semiring::zero() const { return impl_->zero(); }
Scalar Semiring::one() const { return impl_->one(); }

Scalar Semiring::add(const Scalar& a, const Scalar& b) const {
  require(a);
  require(b);
  return impl_->add(a, b);
}

Scalar Semiring::mul(const Scalar& a, const Scalar& b) const {
  require(a);
  require(b);
  return impl_->mul(a, b);
}

bool Semiring::contains(const Scalar& a) const { return impl_->contains(a); }

void Semiring::require(const Scalar& a) const {
  if (!impl_->contains(a)) {
    throw SemiringMismatch("scalar does not belong to semiring " + name());
  }
}

std::optional<Scalar> Semiring::try_invert(const Scalar& a) const {
  require(a);
  return impl_->try_invert(a);
}

std::optional<std::vector<Scalar>> Semiring::carrier() const { return impl_->carrier(); }
std::optional<std::vector<Scalar>> Semiring::units() const { return impl_->units(); }
bool Semiring::has_log_units() const { return impl_->has_log_units(); }

std::optional<Rational> Semiring::unit_log_ratio(const Scalar& a, const Scalar& b) const {
  require(a);
  require(b);
  return impl_->unit_log_ratio(a, b);
}

Scalar Semiring::unit_exp(const Rational& log_value) const { return impl_->unit_exp(log_value); }

std::optional<Rational> Semiring::valuation(const Scalar& a) const {
  require(a);
  return impl_->valuation(a);
}

bool Semiring::pair_quasilinear(const Scalar& a_eps, const Scalar& a_eta,
                                const Scalar& beta) const {
  require(a_eps);
  require(a_eta);
  require(beta);
  return impl_->pair_quasilinear(a_eps, a_eta, beta);
}

bool Semiring::has_nql() const {
  const auto all = carrier();
  if (!all) return flags().nql;
  for (const auto& a : *all) {
    if (is_zero(a)) continue;
    for (const auto& c : *all) {
      if (is_zero(c)) continue;
      const bool moves = std::any_of(all->begin(), all->end(),
                                     [&](const Scalar& mu) { return add(a, mul(mu, c)) != a; });
      if (!moves) return false;
    }
  }
  return true;
}

std::vector<Scalar> Semiring::default_sample() const { return impl_->default_sample(); }
std::vector<Scalar> Semiring::scaling_grid() const { return impl_->scaling_grid(); }
std::vector<Scalar> Semiring::scaling_grid(int radius) const { return impl_->scaling_grid(radius); }
Scalar Semiring::random(Rng& rng) const { return impl_->random(rng); }

Scalar Semiring::random_nonzero(Rng& rng) const {
  for (;;) {
    auto a = impl_->random(rng);
    if (!is_zero(a)) return a;
  }
}

Scalar Semiring::random_unit(Rng& rng) const { return impl_->random_unit(rng); }

std::pair<Scalar, Scalar> Semiring::random_split(const Scalar& beta, Rng& rng) const {
  require(beta);
  return impl_->random_split(beta, rng);
}

std::optional<std::vector<std::pair<Scalar, Scalar>>> Semiring::splits(const Scalar& beta) const {
  require(beta);
  return impl_->splits(beta);
}

std::string Semiring::format(const Scalar& a) const {
  require(a);
  return impl_->format(a);
}

nlohmann::json Semiring::to_json(const Scalar& a) const {
  require(a);
  return impl_->to_json(a);
}

Scalar Semiring::parse(const nlohmann::json& literal) const { return impl_->parse(literal); }

Scalar Semiring::parse(std::string_view literal) const {
  return impl_->parse(nlohmann::json(std::string(literal)));
}

// ---------------------------------------------------------------------------

const AxiomVerdict& FlagReport::verdict(std::string_view axiom) const {
  for (const auto& v : verdicts) {
    if (v.axiom == axiom) return v;
  }
  throw std::out_of_range("no verdict for axiom '" + std::string(axiom) + "'");
}

FlagReport axioms_check(const Semiring& s, std::vector<Scalar> sample) {
  FlagReport report;
  const auto all = s.carrier();
  if (sample.empty()) sample = all ? *all : s.default_sample();
  for (const auto& a : sample) s.require(a);
  if (std::find(sample.begin(), sample.end(), s.zero()) == sample.end() ||
      std::find(sample.begin(), sample.end(), s.one()) == sample.end()) {
    throw PreconditionError("axiom sample must contain 0 and 1");
  }
  report.sample_size = sample.size();
  if (all) {
    report.exhaustive = std::all_of(all->begin(), all->end(), [&](const Scalar& a) {
      return std::find(sample.begin(), sample.end(), a) != sample.end();
    });
  }

  const Scalar zero = s.zero();
  const Scalar one = s.one();
  auto unary = [&](std::string name, auto&& law) {
    AxiomVerdict v;
    v.axiom = std::move(name);
    for (const auto& a : sample) {
      if (!law(a)) {
        v.holds = false;
        v.witness = {a};
        break;
      }
    }
    report.verdicts.push_back(std::move(v));
  };
  auto binary = [&](std::string name, auto&& law) {
    AxiomVerdict v;
    v.axiom = std::move(name);
    for (const auto& a : sample) {
      for (const auto& b : sample) {
        if (!law(a, b)) {
          v.holds = false;
          v.witness = {a, b};
          goto done;
        }
      }
    }
  done:
    report.verdicts.push_back(std::move(v));
  };
  auto ternary = [&](std::string name, auto&& law) {
    AxiomVerdict v;
    v.axiom = std::move(name);
    for (const auto& a : sample) {
      for (const auto& b : sample) {
        for (const auto& c : sample) {
          if (!law(a, b, c)) {
            v.holds = false;
            v.witness = {a, b, c};
            goto done;
          }
        }
      }
    }
  done:
    report.verdicts.push_back(std::move(v));
  };

  binary("additive commutativity", [&](auto& a, auto& b) { return s.add(a, b) == s.add(b, a); });
  ternary("additive associativity", [&](auto& a, auto& b, auto& c) {
    return s.add(s.add(a, b), c) == s.add(a, s.add(b, c));
  });
  binary("multiplicative commutativity",
         [&](auto& a, auto& b) { return s.mul(a, b) == s.mul(b, a); });
  ternary("multiplicative associativity", [&](auto& a, auto& b, auto& c) {
    return s.mul(s.mul(a, b), c) == s.mul(a, s.mul(b, c));
  });
  ternary("distributivity", [&](auto& a, auto& b, auto& c) {
    return s.mul(a, s.add(b, c)) == s.add(s.mul(a, b), s.mul(a, c));
  });
  unary("additive identity", [&](auto& a) { return s.add(a, zero) == a; });
  unary("multiplicative identity", [&](auto& a) { return s.mul(a, one) == a; });
  unary("zero annihilates", [&](auto& a) { return s.is_zero(s.mul(a, zero)); });
  binary("antiring", [&](auto& a, auto& b) {
    return !s.is_zero(s.add(a, b)) || (s.is_zero(a) && s.is_zero(b));
  });
  binary("entire", [&](auto& a, auto& b) {
    return !s.is_zero(s.mul(a, b)) || s.is_zero(a) || s.is_zero(b);
  });
  binary("indecomposable", [&](auto& a, auto& b) {
    const bool splits_one = !s.is_zero(a) && !s.is_zero(b) && s.is_zero(s.mul(a, b)) &&
                            s.add(a, b) == one;
    return !splits_one;
  });
  binary("frobenius", [&](auto& a, auto& b) {
    return s.square(s.add(a, b)) == s.add(s.square(a), s.square(b));
  });
  unary("doubling-free", [&](auto& a) { return !s.is_zero(s.twice(a)) || s.is_zero(a); });
  if (report.exhaustive) {
    binary("nql", [&](auto& a, auto& c) {
      if (s.is_zero(a) || s.is_zero(c)) return true;
      return std::any_of(sample.begin(), sample.end(),
                         [&](const Scalar& mu) { return s.add(a, s.mul(mu, c)) != a; });
    });
  }

  for (const auto& v : report.verdicts) {
    const auto& name = v.axiom;
    std::optional<bool> declared;
    const auto& f = s.flags();
    if (name == "antiring") declared = f.antiring;
    else if (name == "entire") declared = f.entire;
    else if (name == "indecomposable") declared = f.indecomposable;
    else if (name == "frobenius") declared = f.frobenius;
    else if (name == "doubling-free") declared = f.doubling_free;
    else if (name == "nql") declared = f.nql;
    else declared = true;  // semiring laws are always declared
    if (*declared && !v.holds) report.inconsistent.push_back(name);
    if (!*declared && v.holds && report.exhaustive) report.inconsistent.push_back(name);
  }
  return report;
}

}  // namespace semiform
