#include "semiform/free_module.hpp"

#include <algorithm>
#include <iterator>
#include <map>
#include <set>

namespace semiform {

FreeModule::FreeModule(Semiring s, std::size_t rank, std::vector<std::string> labels)
    : semiring_(std::move(s)), rank_(rank), labels_(std::move(labels)) {
  if (labels_.empty()) {
    for (std::size_t i = 0; i < rank_; ++i) labels_.push_back("e" + std::to_string(i + 1));
  }
  if (labels_.size() != rank_) throw DimensionMismatch("label count differs from rank");
  std::set<std::string> seen(labels_.begin(), labels_.end());
  if (seen.size() != labels_.size()) throw PreconditionError("base labels must be distinct");
}

Coeffs FreeModule::zero_vector() const { return Coeffs(rank_, semiring_.zero()); }

Coeffs FreeModule::base_vector(std::size_t i) const {
  if (i >= rank_) throw DimensionMismatch("base index out of range");
  Coeffs x = zero_vector();
  x[i] = semiring_.one();
  return x;
}

void FreeModule::require(const Coeffs& x) const {
  if (x.size() != rank_) {
    throw DimensionMismatch("vector of length " + std::to_string(x.size()) +
                            " in a module of rank " + std::to_string(rank_));
  }
  for (const auto& a : x) semiring_.require(a);
}

IndexSet support(const Semiring& s, const Coeffs& x) {
  IndexSet out;
  for (std::size_t i = 0; i < x.size(); ++i) {
    s.require(x[i]);
    if (!s.is_zero(x[i])) out.push_back(i);
  }
  return out;
}

Coeffs add_vectors(const Semiring& s, const Coeffs& x, const Coeffs& y) {
  if (x.size() != y.size()) throw DimensionMismatch("adding vectors of different lengths");
  Coeffs out;
  out.reserve(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out.push_back(s.add(x[i], y[i]));
  return out;
}

Coeffs scale_vector(const Semiring& s, const Scalar& a, const Coeffs& x) {
  Coeffs out;
  out.reserve(x.size());
  for (const auto& c : x) out.push_back(s.mul(a, c));
  return out;
}

BasicSubmodule make_basic(std::size_t rank, IndexSet indices) {
  std::sort(indices.begin(), indices.end());
  indices.erase(std::unique(indices.begin(), indices.end()), indices.end());
  if (!indices.empty() && indices.back() >= rank) {
    throw DimensionMismatch("base index " + std::to_string(indices.back() + 1) +
                            " exceeds rank " + std::to_string(rank));
  }
  return {rank, std::move(indices)};
}

BasicSubmodule basic_lattice(LatticeOp op, const BasicSubmodule& w,
                             const std::optional<BasicSubmodule>& other) {
  IndexSet out;
  if (op == LatticeOp::Complement) {
    for (std::size_t i = 0; i < w.rank; ++i) {
      if (!std::binary_search(w.indices.begin(), w.indices.end(), i)) out.push_back(i);
    }
    return {w.rank, out};
  }
  if (!other) throw PreconditionError("lattice operation needs a second submodule");
  if (other->rank != w.rank) throw DimensionMismatch("submodules of different modules");
  const auto& a = w.indices;
  const auto& b = other->indices;
  switch (op) {
    case LatticeOp::Meet:
      std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
      break;
    case LatticeOp::Join:
      std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
      break;
    case LatticeOp::RelativeComplement:
      if (!std::includes(b.begin(), b.end(), a.begin(), a.end())) {
        throw PreconditionError("relative complement needs the first submodule inside the second");
      }
      std::set_difference(b.begin(), b.end(), a.begin(), a.end(), std::back_inserter(out));
      break;
    case LatticeOp::Complement:
      break;
  }
  return {w.rank, out};
}

Matrix identity_matrix(const Semiring& s, std::size_t n) {
  Matrix m = zero_matrix(s, n);
  for (std::size_t i = 0; i < n; ++i) m[i][i] = s.one();
  return m;
}

Matrix zero_matrix(const Semiring& s, std::size_t n) {
  return Matrix(n, std::vector<Scalar>(n, s.zero()));
}

Matrix matrix_product(const Semiring& s, const Matrix& a, const Matrix& b) {
  const std::size_t inner = b.size();
  const std::size_t cols = inner == 0 ? 0 : b[0].size();
  Matrix out(a.size(), std::vector<Scalar>(cols, s.zero()));
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].size() != inner) throw DimensionMismatch("matrix product shape mismatch");
    for (std::size_t k = 0; k < inner; ++k) {
      if (s.is_zero(a[i][k])) continue;
      for (std::size_t j = 0; j < cols; ++j) {
        out[i][j] = s.add(out[i][j], s.mul(a[i][k], b[k][j]));
      }
    }
  }
  return out;
}

Matrix transpose(const Matrix& m) {
  if (m.empty()) return {};
  Matrix out(m[0].size(), std::vector<Scalar>(m.size()));
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (std::size_t j = 0; j < m[i].size(); ++j) out[j][i] = m[i][j];
  }
  return out;
}

std::optional<Matrix> generalized_permutation_inverse(const Semiring& s, const Matrix& m) {
  const std::size_t n = m.size();
  for (const auto& row : m) {
    if (row.size() != n) return std::nullopt;
  }
  Matrix inverse = zero_matrix(s, n);
  std::vector<int> column_hits(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    int hits = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (s.is_zero(m[i][j])) continue;
      ++hits;
      ++column_hits[j];
      auto u = s.try_invert(m[i][j]);
      if (!u) return std::nullopt;
      inverse[j][i] = *u;
    }
    if (hits != 1) return std::nullopt;
  }
  if (std::any_of(column_hits.begin(), column_hits.end(), [](int c) { return c != 1; })) {
    return std::nullopt;
  }
  return inverse;
}

bool is_generalized_permutation(const Semiring& s, const Matrix& m) {
  return generalized_permutation_inverse(s, m).has_value();
}

BaseGuarantee unique_base_guarantee(const Semiring& s) {
  if (s.kind() == SemiringKind::Product) return BaseGuarantee::NotGuaranteed;
  const auto& f = s.flags();
  if (f.antiring && (f.entire || f.indecomposable)) return BaseGuarantee::Guaranteed;
  return BaseGuarantee::Unknown;
}

std::string to_string(BaseGuarantee g) {
  switch (g) {
    case BaseGuarantee::Guaranteed:
      return "guaranteed";
    case BaseGuarantee::NotGuaranteed:
      return "not-guaranteed";
    case BaseGuarantee::Unknown:
      return "unknown";
  }
  return "unknown";
}

bool projectively_standard(const Semiring& s, const std::vector<Coeffs>& candidates) {
  std::vector<bool> used(candidates.size(), false);
  for (const auto& v : candidates) {
    const auto supp = support(s, v);
    if (supp.size() != 1 || supp[0] >= used.size() || used[supp[0]]) return false;
    if (!s.is_unit(v[supp[0]])) return false;
    used[supp[0]] = true;
  }
  return true;
}

namespace {

constexpr std::size_t kMaxCombinations = 4'000'000;

std::vector<Scalar> closure_once(const Semiring& s, const std::vector<Scalar>& sample) {
  std::set<Scalar> out(sample.begin(), sample.end());
  for (const auto& a : sample) {
    for (const auto& b : sample) {
      out.insert(s.add(a, b));
      out.insert(s.mul(a, b));
    }
  }
  return {out.begin(), out.end()};
}

// Calls visit(tuple) for every tuple in values^n, odometer order.
template <typename Visit>
void for_each_tuple(const std::vector<Scalar>& values, std::size_t n, Visit&& visit) {
  std::vector<std::size_t> digits(n, 0);
  Coeffs tuple(n, values.front());
  for (;;) {
    visit(tuple);
    std::size_t pos = n;
    while (pos > 0) {
      --pos;
      if (++digits[pos] < values.size()) {
        tuple[pos] = values[digits[pos]];
        break;
      }
      digits[pos] = 0;
      tuple[pos] = values[0];
      if (pos == 0) return;
    }
    if (n == 0) return;
  }
}

std::size_t checked_power(std::size_t base, std::size_t exp) {
  std::size_t out = 1;
  for (std::size_t i = 0; i < exp; ++i) {
    if (base != 0 && out > kMaxCombinations / base) {
      throw PreconditionError("coefficient search space too large for base verification");
    }
    out *= base;
  }
  return out;
}

}  // namespace

BaseVerification verify_base(const FreeModule& module, const std::vector<Coeffs>& candidates,
                             const std::vector<Scalar>& sample) {
  const auto& s = module.semiring();
  const std::size_t n = module.rank();
  if (candidates.size() != n) {
    throw DimensionMismatch("verify_base needs exactly rank-many candidates");
  }
  for (const auto& v : candidates) module.require(v);

  BaseVerification out;
  out.projectively_standard = projectively_standard(s, candidates);

  const auto all = s.carrier();
  std::vector<Scalar> box;
  std::vector<Scalar> target_values;
  if (all) {
    box = *all;
    target_values = *all;
    out.exhaustive = true;
  } else {
    target_values = sample.empty() ? s.default_sample() : sample;
    for (const auto& a : target_values) s.require(a);
    std::sort(target_values.begin(), target_values.end());
    target_values.erase(std::unique(target_values.begin(), target_values.end()),
                        target_values.end());
    box = closure_once(s, target_values);
  }
  out.combinations = checked_power(box.size(), n);
  out.targets = checked_power(target_values.size(), n);

  std::map<Coeffs, std::size_t> representations;
  if (n > 0) {
    for_each_tuple(box, n, [&](const Coeffs& c) {
      Coeffs sum = module.zero_vector();
      for (std::size_t k = 0; k < n; ++k) {
        if (s.is_zero(c[k])) continue;
        sum = add_vectors(s, sum, scale_vector(s, c[k], candidates[k]));
      }
      auto& count = representations[sum];
      count = std::min<std::size_t>(count + 1, 2);
    });
  }

  out.is_base = true;
  if (n == 0) return out;
  for_each_tuple(target_values, n, [&](const Coeffs& target) {
    if (!out.is_base) return;
    const auto it = representations.find(target);
    const std::size_t count = it == representations.end() ? 0 : it->second;
    if (count != 1) {
      out.is_base = false;
      out.witness = target;
      out.witness_representations = count;
    }
  });
  return out;
}

}  // namespace semiform
