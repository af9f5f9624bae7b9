#include "semiform/forms.hpp"

#include <algorithm>

namespace semiform {

namespace {

void require_matching(const Semiring& a, const Semiring& b) {
  if (!(a == b)) throw SemiringMismatch("forms over " + a.name() + " and " + b.name());
}

void require_length(std::size_t rank, const Coeffs& x) {
  if (x.size() != rank) {
    throw DimensionMismatch("vector of length " + std::to_string(x.size()) +
                            " for a form of rank " + std::to_string(rank));
  }
}

// All vectors with coefficients in `values`, in odometer order.
std::vector<Coeffs> all_vectors(const std::vector<Scalar>& values, std::size_t n) {
  std::vector<Coeffs> out{Coeffs{}};
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<Coeffs> next;
    next.reserve(out.size() * values.size());
    for (const auto& prefix : out) {
      for (const auto& v : values) {
        auto x = prefix;
        x.push_back(v);
        next.push_back(std::move(x));
      }
    }
    out = std::move(next);
  }
  return out;
}

}  // namespace

GramMatrix::GramMatrix(Semiring s, Matrix entries)
    : semiring_(std::move(s)), entries_(std::move(entries)) {
  const std::size_t n = entries_.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (entries_[i].size() != n) throw DimensionMismatch("Gram matrix is not square");
    for (const auto& a : entries_[i]) semiring_.require(a);
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (entries_[i][j] != entries_[j][i]) {
        throw PreconditionError("asymmetric at (" + std::to_string(i + 1) + "," +
                                std::to_string(j + 1) + ")");
      }
    }
  }
}

GramMatrix GramMatrix::diagonal(const Semiring& s, const Coeffs& diag) {
  Matrix m = zero_matrix(s, diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m[i][i] = diag[i];
  return GramMatrix(s, std::move(m));
}

GramMatrix GramMatrix::zero(const Semiring& s, std::size_t n) {
  return GramMatrix(s, zero_matrix(s, n));
}

QuadraticScheme::QuadraticScheme(Semiring s, Coeffs diag, OffMap off)
    : semiring_(std::move(s)), diag_(std::move(diag)) {
  for (const auto& a : diag_) semiring_.require(a);
  for (auto& [key, value] : off) {
    const auto [i, j] = key;
    if (i >= j || j >= diag_.size()) {
      throw PreconditionError("bad scheme key (" + std::to_string(i + 1) + "," +
                              std::to_string(j + 1) + ")");
    }
    semiring_.require(value);
    if (!semiring_.is_zero(value)) off_.emplace(key, value);
  }
}

QuadraticScheme QuadraticScheme::zero(const Semiring& s, std::size_t n) {
  return QuadraticScheme(s, Coeffs(n, s.zero()));
}

Scalar QuadraticScheme::off(std::size_t i, std::size_t j) const {
  if (i > j) std::swap(i, j);
  const auto it = off_.find({i, j});
  return it == off_.end() ? semiring_.zero() : it->second;
}

const Semiring& form_semiring(const Form& f) {
  return std::visit([](const auto& g) -> const Semiring& { return g.semiring(); }, f);
}

std::size_t form_rank(const Form& f) {
  return std::visit([](const auto& g) { return g.rank(); }, f);
}

bool is_quadratic(const Form& f) { return std::holds_alternative<QuadraticScheme>(f); }

Scalar eval_bilinear(const GramMatrix& b, const Coeffs& x, const Coeffs& y) {
  const auto& s = b.semiring();
  require_length(b.rank(), x);
  require_length(b.rank(), y);
  Scalar total = s.zero();
  for (std::size_t i = 0; i < b.rank(); ++i) {
    if (s.is_zero(x[i])) continue;
    for (std::size_t j = 0; j < b.rank(); ++j) {
      if (s.is_zero(y[j]) || s.is_zero(b(i, j))) continue;
      total = s.add(total, s.mul(s.mul(x[i], y[j]), b(i, j)));
    }
  }
  return total;
}

Scalar eval_quadratic(const QuadraticScheme& q, const Coeffs& x) {
  const auto& s = q.semiring();
  require_length(q.rank(), x);
  Scalar total = s.zero();
  for (std::size_t i = 0; i < q.rank(); ++i) {
    if (s.is_zero(x[i]) || s.is_zero(q.diag(i))) continue;
    total = s.add(total, s.mul(q.diag(i), s.square(x[i])));
  }
  for (const auto& [key, coeff] : q.off_entries()) {
    const auto& xi = x[key.first];
    const auto& xj = x[key.second];
    if (s.is_zero(xi) || s.is_zero(xj)) continue;
    total = s.add(total, s.mul(coeff, s.mul(xi, xj)));
  }
  return total;
}

Scalar eval_expansion(const Expansion& e, const Coeffs& x, const Coeffs& y) {
  const auto& s = e.semiring;
  require_length(e.entries.size(), x);
  require_length(e.entries.size(), y);
  Scalar total = s.zero();
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = 0; j < y.size(); ++j) {
      total = s.add(total, s.mul(s.mul(x[i], y[j]), e.entries[i][j]));
    }
  }
  return total;
}

CheckResult is_companion(const QuadraticScheme& q, const GramMatrix& b, Rng& rng,
                         std::size_t samples, std::size_t exhaustive_limit) {
  require_matching(q.semiring(), b.semiring());
  if (q.rank() != b.rank()) throw DimensionMismatch("companion of a different rank");
  const auto& s = q.semiring();
  const std::size_t n = q.rank();
  CheckResult out;
  auto check = [&](const Coeffs& x, const Coeffs& y) {
    ++out.checked;
    const auto lhs = eval_quadratic(q, add_vectors(s, x, y));
    const auto rhs = s.add(s.add(eval_quadratic(q, x), eval_quadratic(q, y)), eval_bilinear(b, x, y));
    if (lhs != rhs) {
      out.holds = false;
      out.witness = {x, y};
    }
    return out.holds;
  };

  const auto all = s.carrier();
  if (all) {
    std::size_t count = 1;
    bool small = true;
    for (std::size_t i = 0; i < 2 * n && small; ++i) {
      if (count > exhaustive_limit / all->size()) small = false;
      count *= all->size();
    }
    if (small) {
      out.exhaustive = true;
      const auto vectors = all_vectors(*all, n);
      for (const auto& x : vectors) {
        for (const auto& y : vectors) {
          if (!check(x, y)) return out;
        }
      }
      return out;
    }
  }

  // Base vectors and their pairwise sums first; they catch most failures.
  FreeModule module(s, n);
  std::vector<Coeffs> small;
  for (std::size_t i = 0; i < n; ++i) {
    small.push_back(module.base_vector(i));
    for (std::size_t j = i + 1; j < n; ++j) {
      small.push_back(add_vectors(s, module.base_vector(i), module.base_vector(j)));
    }
  }
  for (const auto& x : small) {
    for (const auto& y : small) {
      if (!check(x, y)) return out;
    }
  }
  const auto grid = s.scaling_grid();
  std::uniform_int_distribution<std::size_t> pick(0, grid.size() - 1);
  for (std::size_t t = 0; t < samples; ++t) {
    Coeffs x(n), y(n);
    for (auto& c : x) c = grid[pick(rng)];
    for (auto& c : y) c = grid[pick(rng)];
    if (!check(x, y)) return out;
  }
  return out;
}

GramMatrix balanced_companion(const QuadraticScheme& q) {
  const auto& s = q.semiring();
  Matrix m = zero_matrix(s, q.rank());
  for (std::size_t i = 0; i < q.rank(); ++i) m[i][i] = s.twice(q.diag(i));
  for (const auto& [key, value] : q.off_entries()) {
    m[key.first][key.second] = value;
    m[key.second][key.first] = value;
  }
  return GramMatrix(s, std::move(m));
}

GramMatrix quasiminimal_reduce(const QuadraticScheme& q, const GramMatrix& b) {
  require_matching(q.semiring(), b.semiring());
  if (q.rank() != b.rank()) throw DimensionMismatch("companion of a different rank");
  const auto& s = q.semiring();
  if (s.carrier()) {
    Rng rng(0);
    if (!is_companion(q, b, rng, 200, 1u << 12).holds) {
      throw PreconditionError("b is not a companion of q");
    }
  }
  Matrix m = b.entries();
  for (std::size_t i = 0; i < q.rank(); ++i) {
    for (std::size_t j = i + 1; j < q.rank(); ++j) {
      if (s.pair_quasilinear(q.diag(i), q.diag(j), q.off(i, j))) {
        m[i][j] = s.zero();
        m[j][i] = s.zero();
      }
    }
  }
  return GramMatrix(s, std::move(m));
}

GramMatrix alternate_part(const GramMatrix& b) {
  Matrix m = b.entries();
  for (std::size_t i = 0; i < m.size(); ++i) m[i][i] = b.semiring().zero();
  return GramMatrix(b.semiring(), std::move(m));
}

QuadraticScheme norm_form(const GramMatrix& gamma) {
  const auto& s = gamma.semiring();
  Coeffs diag;
  OffMap off;
  for (std::size_t i = 0; i < gamma.rank(); ++i) {
    diag.push_back(gamma(i, i));
    for (std::size_t j = i + 1; j < gamma.rank(); ++j) off.emplace(std::pair{i, j}, s.twice(gamma(i, j)));
  }
  return QuadraticScheme(s, std::move(diag), std::move(off));
}

bool is_balanced_for(const QuadraticScheme& q, const GramMatrix& b) {
  if (!(q.semiring() == b.semiring()) || q.rank() != b.rank()) return false;
  const auto& s = q.semiring();
  for (std::size_t i = 0; i < q.rank(); ++i) {
    if (b(i, i) != s.twice(q.diag(i))) return false;
    for (std::size_t j = i + 1; j < q.rank(); ++j) {
      const auto a = q.off(i, j);
      if (b(i, j) == a) continue;
      if (!s.pair_quasilinear(q.diag(i), q.diag(j), a) ||
          !s.pair_quasilinear(q.diag(i), q.diag(j), b(i, j))) {
        return false;
      }
    }
  }
  return true;
}

Expansion make_expansion(const QuadraticScheme& q, const GramMatrix& b, const SplitChoice& splits) {
  if (!is_balanced_for(q, b)) throw PreconditionError("b is not a balanced companion of q");
  const auto& s = q.semiring();
  const std::size_t n = q.rank();
  Expansion e{s, zero_matrix(s, n)};
  for (std::size_t i = 0; i < n; ++i) {
    e.entries[i][i] = q.diag(i);
    for (std::size_t j = i + 1; j < n; ++j) e.entries[i][j] = b(i, j);
  }
  for (const auto& [key, split] : splits) {
    const auto [i, j] = key;
    if (i >= j || j >= n) throw PreconditionError("split key must satisfy i < j <= rank");
    if (s.add(split.first, split.second) != b(i, j)) {
      throw PreconditionError("split at (" + std::to_string(i + 1) + "," + std::to_string(j + 1) +
                              ") does not sum to b_ij");
    }
    e.entries[i][j] = split.first;
    e.entries[j][i] = split.second;
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const auto sum = s.add(e.entries[i][j], e.entries[j][i]);
      const auto expected = i == j ? b(i, i) : b(i, j);
      if (sum != expected) throw Error("expansion does not reproduce b");
    }
  }
  return e;
}

FormPredicates predicates(const GramMatrix& b) {
  const auto& s = b.semiring();
  FormPredicates p;
  p.is_alternate = true;
  p.is_anisotropic = true;
  for (std::size_t i = 0; i < b.rank(); ++i) {
    if (!s.is_zero(b(i, i))) p.is_alternate = false;
    if (s.is_zero(b(i, i))) p.is_anisotropic = false;
  }
  p.is_diagonally_zero = p.is_alternate;
  return p;
}

FormPredicates predicates(const QuadraticScheme& q) {
  const auto& s = q.semiring();
  FormPredicates p;
  p.is_diagonally_zero = std::all_of(q.diagonal().begin(), q.diagonal().end(),
                                     [&](const Scalar& a) { return s.is_zero(a); });
  p.is_anisotropic = std::none_of(q.diagonal().begin(), q.diagonal().end(),
                                  [&](const Scalar& a) { return s.is_zero(a); });
  p.rigid_sufficient = p.is_diagonally_zero;
  p.is_quasilinear_scheme = true;
  for (const auto& [key, value] : q.off_entries()) {
    if (!s.pair_quasilinear(q.diag(key.first), q.diag(key.second), value)) {
      p.is_quasilinear_scheme = false;
    }
  }
  return p;
}

Matrix coefficient_matrix(const Form& f) {
  if (const auto* b = std::get_if<GramMatrix>(&f)) return b->entries();
  const auto& q = std::get<QuadraticScheme>(f);
  Matrix m = zero_matrix(q.semiring(), q.rank());
  for (std::size_t i = 0; i < q.rank(); ++i) m[i][i] = q.diag(i);
  for (const auto& [key, value] : q.off_entries()) {
    m[key.first][key.second] = value;
    m[key.second][key.first] = value;
  }
  return m;
}

Form form_from_coefficients(const Form& like, const Matrix& m) {
  const auto& s = form_semiring(like);
  if (!is_quadratic(like)) return GramMatrix(s, m);
  Coeffs diag;
  OffMap off;
  for (std::size_t i = 0; i < m.size(); ++i) {
    diag.push_back(m[i][i]);
    for (std::size_t j = i + 1; j < m.size(); ++j) off.emplace(std::pair{i, j}, m[i][j]);
  }
  return QuadraticScheme(s, std::move(diag), std::move(off));
}

GramMatrix restrict_form(const GramMatrix& b, const IndexSet& indices) {
  Matrix m;
  for (auto i : indices) {
    std::vector<Scalar> row;
    for (auto j : indices) row.push_back(b(i, j));
    m.push_back(std::move(row));
  }
  return GramMatrix(b.semiring(), std::move(m));
}

QuadraticScheme restrict_form(const QuadraticScheme& q, const IndexSet& indices) {
  Coeffs diag;
  OffMap off;
  for (std::size_t a = 0; a < indices.size(); ++a) {
    diag.push_back(q.diag(indices[a]));
    for (std::size_t c = a + 1; c < indices.size(); ++c) {
      off.emplace(std::pair{a, c}, q.off(indices[a], indices[c]));
    }
  }
  return QuadraticScheme(q.semiring(), std::move(diag), std::move(off));
}

Form restrict_form(const Form& f, const IndexSet& indices) {
  return std::visit([&](const auto& g) -> Form { return restrict_form(g, indices); }, f);
}

Form orthogonal_sum(const Form& a, const Form& b) {
  if (is_quadratic(a) != is_quadratic(b)) throw PreconditionError("orthogonal sum of mixed kinds");
  require_matching(form_semiring(a), form_semiring(b));
  const auto& s = form_semiring(a);
  const auto ma = coefficient_matrix(a);
  const auto mb = coefficient_matrix(b);
  const std::size_t n = ma.size();
  Matrix m = zero_matrix(s, n + mb.size());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) m[i][j] = ma[i][j];
  }
  for (std::size_t i = 0; i < mb.size(); ++i) {
    for (std::size_t j = 0; j < mb.size(); ++j) m[n + i][n + j] = mb[i][j];
  }
  return form_from_coefficients(a, m);
}

}  // namespace semiform
