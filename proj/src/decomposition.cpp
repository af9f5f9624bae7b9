#include "semiform/decomposition.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

namespace semiform {

std::vector<std::vector<std::size_t>> BaseGraph::adjacency() const {
  std::vector<std::vector<std::size_t>> adj(vertices);
  for (const auto& e : edges) {
    adj[e.i].push_back(e.j);
    adj[e.j].push_back(e.i);
  }
  for (auto& row : adj) std::sort(row.begin(), row.end());
  return adj;
}

BaseGraph make_graph(std::size_t vertices,
                     const std::vector<std::pair<std::size_t, std::size_t>>& edges) {
  BaseGraph g{vertices, {}};
  for (auto [i, j] : edges) {
    if (i == j) throw PreconditionError("base graphs have no self-loops");
    if (i > j) std::swap(i, j);
    if (j >= vertices) throw DimensionMismatch("edge endpoint out of range");
    g.edges.push_back({i, j, Scalar{}});
  }
  return g;
}

BaseGraph base_graph_bilinear(const GramMatrix& b) {
  BaseGraph g{b.rank(), {}};
  const auto& s = b.semiring();
  for (std::size_t i = 0; i < b.rank(); ++i) {
    for (std::size_t j = i + 1; j < b.rank(); ++j) {
      if (!s.is_zero(b(i, j))) g.edges.push_back({i, j, b(i, j)});
    }
  }
  return g;
}

BaseGraph base_graph_quadratic(const QuadraticScheme& q) {
  BaseGraph g{q.rank(), {}};
  const auto& s = q.semiring();
  for (const auto& [key, value] : q.off_entries()) {
    if (!s.pair_quasilinear(q.diag(key.first), q.diag(key.second), value)) {
      g.edges.push_back({key.first, key.second, value});
    }
  }
  return g;
}

BaseGraph base_graph(const Form& f) {
  if (const auto* q = std::get_if<QuadraticScheme>(&f)) return base_graph_quadratic(*q);
  return base_graph_bilinear(std::get<GramMatrix>(f));
}

BasePartition connected_components(const BaseGraph& g) {
  const auto adj = g.adjacency();
  std::vector<bool> seen(g.vertices, false);
  BasePartition out;
  for (std::size_t start = 0; start < g.vertices; ++start) {
    if (seen[start]) continue;
    IndexSet block;
    std::deque<std::size_t> queue{start};
    seen[start] = true;
    while (!queue.empty()) {
      const auto v = queue.front();
      queue.pop_front();
      block.push_back(v);
      for (auto w : adj[v]) {
        if (!seen[w]) {
          seen[w] = true;
          queue.push_back(w);
        }
      }
    }
    std::sort(block.begin(), block.end());
    out.push_back(std::move(block));
  }
  return out;
}

BasePartition decompose(const Form& f) { return connected_components(base_graph(f)); }

bool is_indecomposable(const Form& f) { return form_rank(f) >= 1 && decompose(f).size() == 1; }

BasePartition normalize_partition(std::size_t n, BasePartition p) {
  std::vector<bool> hit(n, false);
  for (auto& block : p) {
    if (block.empty()) throw PreconditionError("partition blocks must be nonempty");
    std::sort(block.begin(), block.end());
    for (auto i : block) {
      if (i >= n) throw DimensionMismatch("partition index out of range");
      if (hit[i]) throw PreconditionError("partition blocks overlap");
      hit[i] = true;
    }
  }
  if (std::find(hit.begin(), hit.end(), false) != hit.end()) {
    throw PreconditionError("partition does not cover the base");
  }
  std::sort(p.begin(), p.end(), [](const IndexSet& a, const IndexSet& b) { return a[0] < b[0]; });
  return p;
}

bool is_block_union(const BasePartition& p, const IndexSet& indices) {
  for (const auto& block : p) {
    std::size_t inside = 0;
    for (auto i : block) {
      if (std::binary_search(indices.begin(), indices.end(), i)) ++inside;
    }
    if (inside != 0 && inside != block.size()) return false;
  }
  return true;
}

namespace {

void largest_exponent(const Semiring& s, const Scalar& a, Rational& best) {
  if (s.kind() == SemiringKind::Product) {
    const auto factors = s.factors();
    const auto& parts = a.as<ProductElement>().parts;
    for (std::size_t k = 0; k < factors.size(); ++k) largest_exponent(factors[k], parts[k], best);
    return;
  }
  if (const auto v = s.valuation(a)) best = std::max(best, boost::abs(*v));
}

}  // namespace

int grid_radius(const Semiring& s, const Matrix& m) {
  Rational best(0);
  for (const auto& row : m) {
    for (const auto& a : row) largest_exponent(s, a, best);
  }
  const auto ceil = (best.numerator() + best.denominator() - 1) / best.denominator();
  return static_cast<int>(std::max<std::int64_t>(6, ceil + 2));
}

namespace {

struct Side {
  IndexSet inside;
  IndexSet outside;
};

std::vector<Coeffs> vectors_on(const std::vector<Scalar>& values, const IndexSet& support,
                               std::size_t n, const Scalar& zero) {
  std::vector<Coeffs> out{Coeffs(n, zero)};
  for (auto i : support) {
    std::vector<Coeffs> next;
    for (const auto& prefix : out) {
      for (const auto& v : values) {
        auto x = prefix;
        x[i] = v;
        next.push_back(std::move(x));
      }
    }
    out = std::move(next);
  }
  return out;
}

}  // namespace

CheckResult verify_orthogonality(const Form& f, const BasePartition& partition, Rng& rng,
                                 const OrthogonalityOptions& options) {
  const std::size_t n = form_rank(f);
  const auto p = normalize_partition(n, partition);
  const auto& s = form_semiring(f);
  CheckResult out;

  if (const auto* b = std::get_if<GramMatrix>(&f)) {
    out.exhaustive = true;
    for (const auto& block : p) {
      for (auto i : block) {
        for (std::size_t j = 0; j < n; ++j) {
          if (std::binary_search(block.begin(), block.end(), j)) continue;
          ++out.checked;
          if (!s.is_zero((*b)(i, j))) {
            FreeModule module(s, n);
            out.holds = false;
            out.witness = {module.base_vector(i), module.base_vector(j)};
            return out;
          }
        }
      }
    }
    return out;
  }

  const auto& q = std::get<QuadraticScheme>(f);
  auto check = [&](const Coeffs& x, const Coeffs& y) {
    ++out.checked;
    const auto lhs = eval_quadratic(q, add_vectors(s, x, y));
    if (lhs != s.add(eval_quadratic(q, x), eval_quadratic(q, y))) {
      out.holds = false;
      out.witness = {x, y};
    }
    return out.holds;
  };

  std::vector<Side> sides;
  for (const auto& block : p) {
    Side side{block, {}};
    for (std::size_t j = 0; j < n; ++j) {
      if (!std::binary_search(block.begin(), block.end(), j)) side.outside.push_back(j);
    }
    if (!side.outside.empty()) sides.push_back(std::move(side));
  }
  if (sides.empty()) {
    out.exhaustive = true;
    return out;
  }

  const auto all = s.carrier();
  if (all) {
    const bool small = std::pow(static_cast<double>(all->size()), static_cast<double>(n)) <=
                       static_cast<double>(options.exhaustive_limit);
    if (small) {
      out.exhaustive = true;
      for (const auto& side : sides) {
        const auto xs = vectors_on(*all, side.inside, n, s.zero());
        const auto ys = vectors_on(*all, side.outside, n, s.zero());
        for (const auto& x : xs) {
          for (const auto& y : ys) {
            if (!check(x, y)) return out;
          }
        }
      }
      return out;
    }
  }

  const auto grid = s.scaling_grid(grid_radius(s, coefficient_matrix(f)));
  const Coeffs zero(n, s.zero());
  // Scaled base vectors on either side: every pair.
  for (const auto& side : sides) {
    for (auto i : side.inside) {
      for (auto j : side.outside) {
        if (j < i) continue;  // the pair was already seen from j's block
        for (const auto& a : grid) {
          for (const auto& c : grid) {
            Coeffs x = zero, y = zero;
            x[i] = a;
            y[j] = c;
            if (!check(x, y)) return out;
          }
        }
      }
    }
  }

  std::uniform_int_distribution<std::size_t> pick_value(0, grid.size() - 1);
  auto pick = [&](const IndexSet& from) {
    return from[std::uniform_int_distribution<std::size_t>(0, from.size() - 1)(rng)];
  };
  auto short_vector = [&](const IndexSet& from) {
    Coeffs x = zero;
    x[pick(from)] = grid[pick_value(rng)];
    if (from.size() > 1 && std::uniform_int_distribution<int>(0, 1)(rng) == 1) {
      x[pick(from)] = grid[pick_value(rng)];
    }
    return x;
  };
  auto full_vector = [&](const IndexSet& from) {
    Coeffs x = zero;
    for (auto i : from) x[i] = grid[pick_value(rng)];
    return x;
  };
  for (std::size_t t = 0; t < options.random_pairs; ++t) {
    const auto& side = sides[std::uniform_int_distribution<std::size_t>(0, sides.size() - 1)(rng)];
    if (!check(short_vector(side.inside), short_vector(side.outside))) return out;
  }
  for (std::size_t t = 0; t < options.random_pairs; ++t) {
    const auto& side = sides[std::uniform_int_distribution<std::size_t>(0, sides.size() - 1)(rng)];
    if (!check(full_vector(side.inside), full_vector(side.outside))) return out;
  }
  return out;
}

}  // namespace semiform
