#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "semiform/forms.hpp"

namespace semiform {

struct Edge {
  std::size_t i = 0;  // i < j, 0-based
  std::size_t j = 0;
  Scalar witness;     // coefficient that makes the pair interact
};

struct BaseGraph {
  std::size_t vertices = 0;
  std::vector<Edge> edges;

  std::vector<std::vector<std::size_t>> adjacency() const;
};

// Disjoint blocks covering 0..n-1; each block sorted, blocks ordered by
// their least index.
using BasePartition = std::vector<IndexSet>;

BaseGraph make_graph(std::size_t vertices, const std::vector<std::pair<std::size_t, std::size_t>>& edges);

// Edge {i,j} iff b_ij != 0.
BaseGraph base_graph_bilinear(const GramMatrix& b);
// Edge {i,j} iff q is not quasilinear on the pair (a_i, a_j, a_ij).
BaseGraph base_graph_quadratic(const QuadraticScheme& q);
BaseGraph base_graph(const Form& f);

BasePartition connected_components(const BaseGraph& g);
BasePartition decompose(const Form& f);
// Rank one, or a single connected block.
bool is_indecomposable(const Form& f);

// Sorts blocks and validates that they partition 0..n-1.
BasePartition normalize_partition(std::size_t n, BasePartition p);
// True when `indices` is a union of blocks of `p`.
bool is_block_union(const BasePartition& p, const IndexSet& indices);

struct OrthogonalityOptions {
  std::size_t random_pairs = 200;
  // Exhaustive enumeration over finite carriers up to this many vectors per block.
  std::size_t exhaustive_limit = 1u << 16;
};

// Bilinear: every Gram entry between different blocks is zero.
// Quadratic: q(x+y) = q(x) + q(y) for x supported on one block and y on the
// rest. Exhaustive over finite carriers when small enough; otherwise all
// pairs of scaled base vectors, then random pairs of scaled base vectors and
// two-term sums, then random pairs.
CheckResult verify_orthogonality(const Form& f, const BasePartition& p, Rng& rng,
                                 const OrthogonalityOptions& options = {});

// Radius for scaling grids covering the exponents appearing in `m`.
int grid_radius(const Semiring& s, const Matrix& m);

}  // namespace semiform
