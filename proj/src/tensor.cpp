#include "semiform/tensor.hpp"

namespace semiform {

IndexSet ProductBase::right_major_order() const {
  IndexSet out;
  for (std::size_t k = 0; k < right; ++k) {
    for (std::size_t i = 0; i < left; ++i) out.push_back(index(i, k));
  }
  return out;
}

Coeffs tensor_vectors(const Semiring& s, const Coeffs& x, const Coeffs& y) {
  Coeffs out;
  out.reserve(x.size() * y.size());
  for (const auto& a : x) {
    for (const auto& c : y) out.push_back(s.mul(a, c));
  }
  return out;
}

Matrix kronecker(const Semiring& s, const Matrix& a, const Matrix& b) {
  const ProductBase base{a.size(), b.size()};
  Matrix out = zero_matrix(s, base.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < a.size(); ++j) {
      if (s.is_zero(a[i][j])) continue;
      for (std::size_t k = 0; k < b.size(); ++k) {
        for (std::size_t l = 0; l < b.size(); ++l) {
          out[base.index(i, k)][base.index(j, l)] = s.mul(a[i][j], b[k][l]);
        }
      }
    }
  }
  return out;
}

GramMatrix tensor_bilinear(const GramMatrix& b1, const GramMatrix& b2) {
  if (!(b1.semiring() == b2.semiring())) {
    throw SemiringMismatch("tensor of forms over " + b1.semiring().name() + " and " +
                           b2.semiring().name());
  }
  return GramMatrix(b1.semiring(), kronecker(b1.semiring(), b1.entries(), b2.entries()));
}

QuadraticScheme fold_expansion(const Semiring& s, const Matrix& e) {
  Coeffs diag;
  OffMap off;
  for (std::size_t p = 0; p < e.size(); ++p) {
    diag.push_back(e[p][p]);
    for (std::size_t r = p + 1; r < e.size(); ++r) {
      const auto value = s.add(e[p][r], e[r][p]);
      if (!s.is_zero(value)) off.emplace(std::pair{p, r}, value);
    }
  }
  return QuadraticScheme(s, std::move(diag), std::move(off));
}

QuadraticScheme tensor_quadratic(const GramMatrix& gamma, const QuadraticScheme& q,
                                 const GramMatrix& b, const SplitChoice& splits) {
  const auto& s = q.semiring();
  if (!(gamma.semiring() == s)) {
    throw SemiringMismatch("tensor of forms over " + gamma.semiring().name() + " and " + s.name());
  }
  const auto expansion = make_expansion(q, b, splits);
  return fold_expansion(s, kronecker(s, gamma.entries(), expansion.entries));
}

IndependenceReport expansion_independence_check(const GramMatrix& gamma, const QuadraticScheme& q,
                                                const GramMatrix& b, std::size_t trials,
                                                Rng& rng) {
  const auto& s = q.semiring();
  const auto reference = tensor_quadratic(gamma, q, b);
  IndependenceReport out;

  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < q.rank(); ++i) {
    for (std::size_t j = i + 1; j < q.rank(); ++j) pairs.emplace_back(i, j);
  }
  auto compare = [&](const SplitChoice& splits) {
    ++out.expansions;
    if (tensor_quadratic(gamma, q, b, splits) != reference) {
      out.identical = false;
      out.mismatch = splits;
    }
    return out.identical;
  };

  // Exhaustive when every pair has finitely many splits and the product is small.
  std::vector<std::vector<std::pair<Scalar, Scalar>>> options;
  bool finite = true;
  std::size_t combos = 1;
  for (auto [i, j] : pairs) {
    auto all = s.splits(b(i, j));
    if (!all) {
      finite = false;
      break;
    }
    combos = all->empty() ? 0 : combos * all->size();
    if (combos > trials) finite = false;
    options.push_back(std::move(*all));
    if (!finite) break;
  }
  if (finite) {
    out.exhaustive = true;
    std::vector<std::size_t> digit(pairs.size(), 0);
    for (;;) {
      SplitChoice splits;
      for (std::size_t t = 0; t < pairs.size(); ++t) splits.emplace(pairs[t], options[t][digit[t]]);
      if (!compare(splits)) return out;
      std::size_t t = 0;
      while (t < pairs.size() && ++digit[t] == options[t].size()) digit[t++] = 0;
      if (t == pairs.size()) return out;
    }
  }

  for (std::size_t trial = 0; trial < trials; ++trial) {
    SplitChoice splits;
    for (const auto& key : pairs) splits.emplace(key, s.random_split(b(key.first, key.second), rng));
    if (!compare(splits)) return out;
  }
  return out;
}

GramMatrix scale_form(const Scalar& a, const GramMatrix& b) {
  Matrix m = b.entries();
  for (auto& row : m) {
    for (auto& x : row) x = b.semiring().mul(a, x);
  }
  return GramMatrix(b.semiring(), std::move(m));
}

QuadraticScheme scale_form(const Scalar& a, const QuadraticScheme& q) {
  const auto& s = q.semiring();
  Coeffs diag;
  for (const auto& x : q.diagonal()) diag.push_back(s.mul(a, x));
  OffMap off;
  for (const auto& [key, x] : q.off_entries()) off.emplace(key, s.mul(a, x));
  return QuadraticScheme(s, std::move(diag), std::move(off));
}

GramMatrix add_forms(const GramMatrix& x, const GramMatrix& y) {
  if (x.rank() != y.rank()) throw DimensionMismatch("adding forms of different ranks");
  const auto& s = x.semiring();
  Matrix m = x.entries();
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (std::size_t j = 0; j < m.size(); ++j) m[i][j] = s.add(m[i][j], y(i, j));
  }
  return GramMatrix(s, std::move(m));
}

QuadraticScheme add_forms(const QuadraticScheme& x, const QuadraticScheme& y) {
  if (x.rank() != y.rank()) throw DimensionMismatch("adding forms of different ranks");
  const auto& s = x.semiring();
  Coeffs diag;
  for (std::size_t i = 0; i < x.rank(); ++i) diag.push_back(s.add(x.diag(i), y.diag(i)));
  OffMap off = x.off_entries();
  for (const auto& [key, value] : y.off_entries()) {
    auto [it, inserted] = off.emplace(key, value);
    if (!inserted) it->second = s.add(it->second, value);
  }
  return QuadraticScheme(s, std::move(diag), std::move(off));
}

}  // namespace semiform
