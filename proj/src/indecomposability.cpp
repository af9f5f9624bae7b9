#include "semiform/indecomposability.hpp"

#include <algorithm>
#include <deque>
#include <numeric>

namespace semiform {

bool ParityReport::bipartite() const {
  return std::all_of(components.begin(), components.end(),
                     [](const ComponentParity& c) { return c.bipartite; });
}

ParityReport parity_report(const BaseGraph& g) {
  const auto adj = g.adjacency();
  ParityReport report;
  report.color.assign(g.vertices, -1);
  std::vector<std::size_t> parent(g.vertices), depth(g.vertices, 0);
  for (std::size_t root = 0; root < g.vertices; ++root) {
    if (report.color[root] != -1) continue;
    ComponentParity comp;
    std::deque<std::size_t> queue{root};
    report.color[root] = 0;
    parent[root] = root;
    while (!queue.empty()) {
      const auto v = queue.front();
      queue.pop_front();
      comp.vertices.push_back(v);
      for (auto w : adj[v]) {
        if (report.color[w] != -1) continue;
        report.color[w] = 1 - report.color[v];
        parent[w] = v;
        depth[w] = depth[v] + 1;
        queue.push_back(w);
      }
    }
    std::sort(comp.vertices.begin(), comp.vertices.end());
    for (auto u : comp.vertices) {
      for (auto w : adj[u]) {
        if (w < u || report.color[w] != report.color[u]) continue;
        // Tree paths from u and w up to their common ancestor close an odd cycle.
        std::vector<std::size_t> up{u}, down{w};
        auto a = u, b = w;
        while (depth[a] > depth[b]) up.push_back(a = parent[a]);
        while (depth[b] > depth[a]) down.push_back(b = parent[b]);
        while (a != b) {
          up.push_back(a = parent[a]);
          down.push_back(b = parent[b]);
        }
        down.pop_back();  // the common ancestor is already on `up`
        std::vector<std::size_t> cycle = up;
        cycle.insert(cycle.end(), down.rbegin(), down.rend());
        // Canonical form: start at the least vertex, walk towards the smaller neighbour.
        std::rotate(cycle.begin(), std::min_element(cycle.begin(), cycle.end()), cycle.end());
        if (cycle.size() > 2 && cycle.back() < cycle[1]) std::reverse(cycle.begin() + 1, cycle.end());
        cycle.push_back(cycle.front());
        comp.odd_cycle = std::move(cycle);
        comp.bipartite = false;
        break;
      }
      if (!comp.bipartite) break;
    }
    report.components.push_back(std::move(comp));
  }
  return report;
}

namespace {

void require_entire_antiring(const Semiring& s) {
  if (!s.flags().antiring || !s.flags().entire) {
    throw PreconditionError("tensor predictions need an entire antiring; " + s.name() +
                            " is not one");
  }
}

bool is_rank_one_zero(const Form& f) {
  if (form_rank(f) != 1) return false;
  const auto m = coefficient_matrix(f);
  return form_semiring(f).is_zero(m[0][0]);
}

void require_indecomposable(const Form& f, const std::string& what) {
  if (!is_indecomposable(f)) throw PreconditionError(what + " is not indecomposable");
  if (is_rank_one_zero(f)) throw PreconditionError(what + " is the rank-one zero form");
}

BasePartition single_block(std::size_t n) {
  IndexSet all(n);
  std::iota(all.begin(), all.end(), std::size_t{0});
  return {all};
}

}  // namespace

TensorPrediction predict_bilinear_tensor(const GramMatrix& b1, const GramMatrix& b2) {
  if (!(b1.semiring() == b2.semiring())) throw SemiringMismatch("factors over different semirings");
  require_entire_antiring(b1.semiring());
  require_indecomposable(b1, "first factor");
  require_indecomposable(b2, "second factor");
  const ProductBase base{b1.rank(), b2.rank()};

  if (!predicates(b1).is_alternate || !predicates(b2).is_alternate) {
    return {single_block(base.size()), "a factor is not alternate"};
  }
  const auto p1 = parity_report(base_graph_bilinear(b1));
  const auto p2 = parity_report(base_graph_bilinear(b2));
  if (!p1.bipartite() || !p2.bipartite()) return {single_block(base.size()), "odd cycle"};

  BasePartition parts(2);
  for (std::size_t p = 0; p < base.size(); ++p) {
    const auto [i, k] = base.pair(p);
    parts[p1.color[i] ^ p2.color[k]].push_back(p);
  }
  return {normalize_partition(base.size(), parts), "alternate factors with only even cycles"};
}

TensorPrediction predict_quadratic_tensor(const GramMatrix& gamma, const QuadraticScheme& q,
                                          const GramMatrix& b) {
  const auto& s = q.semiring();
  if (!(gamma.semiring() == s) || !(b.semiring() == s)) {
    throw SemiringMismatch("factors over different semirings");
  }
  require_entire_antiring(s);
  if (!s.has_nql()) throw PreconditionError(s.name() + " does not have NQL");
  require_indecomposable(norm_form(gamma), "norm form of gamma");
  if (is_rank_one_zero(gamma)) throw PreconditionError("gamma is the rank-one zero form");
  require_indecomposable(q, "q");
  if (!is_balanced_for(q, b)) throw PreconditionError("b is not a balanced companion of q");
  const ProductBase base{gamma.rank(), q.rank()};

  const bool exceptional = predicates(gamma).is_alternate && predicates(q).is_diagonally_zero &&
                           parity_report(base_graph_bilinear(gamma)).bipartite() &&
                           parity_report(base_graph_bilinear(b)).bipartite();
  if (!exceptional) return {single_block(base.size()), "not (alternate, diagonally zero, even)"};
  const auto reduced = tensor_bilinear(gamma, quasiminimal_reduce(q, b));
  return {decompose(reduced), "alternate gamma, diagonally zero q, only even cycles"};
}

std::vector<BlockPrediction> full_tensor_analysis(const GramMatrix& gamma, const QuadraticScheme& q,
                                                  const GramMatrix& b) {
  const ProductBase base{gamma.rank(), q.rank()};
  std::vector<BlockPrediction> out;
  for (const auto& block : decompose(norm_form(gamma))) {
    const auto piece = restrict_form(gamma, block);
    BlockPrediction entry{block, {}};
    if (is_rank_one_zero(piece) || is_rank_one_zero(q)) {
      // A zero factor makes the whole product zero: every position is its own component.
      for (auto i : block) {
        for (std::size_t k = 0; k < q.rank(); ++k) entry.prediction.partition.push_back({base.index(i, k)});
      }
      entry.prediction.reason = "zero factor";
    } else {
      const auto local = predict_quadratic_tensor(piece, q, b);
      const ProductBase local_base{block.size(), q.rank()};
      for (const auto& part : local.partition) {
        IndexSet global;
        for (auto p : part) {
          const auto [i, k] = local_base.pair(p);
          global.push_back(base.index(block[i], k));
        }
        std::sort(global.begin(), global.end());
        entry.prediction.partition.push_back(std::move(global));
      }
      entry.prediction.reason = local.reason;
    }
    std::sort(entry.prediction.partition.begin(), entry.prediction.partition.end());
    out.push_back(std::move(entry));
  }
  return out;
}

CrosscheckVerdict oracle_crosscheck(const TensorPrediction& prediction, const Form& actual) {
  CrosscheckVerdict out;
  out.actual = decompose(actual);
  out.predicted = normalize_partition(form_rank(actual), prediction.partition);
  out.match = out.predicted == out.actual;
  return out;
}

CrosscheckVerdict oracle_crosscheck(const std::vector<BlockPrediction>& predictions,
                                    const Form& actual) {
  TensorPrediction merged;
  for (const auto& entry : predictions) {
    merged.partition.insert(merged.partition.end(), entry.prediction.partition.begin(),
                            entry.prediction.partition.end());
  }
  return oracle_crosscheck(merged, actual);
}

}  // namespace semiform
