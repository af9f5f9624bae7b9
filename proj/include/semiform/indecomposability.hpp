#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "semiform/decomposition.hpp"
#include "semiform/tensor.hpp"

namespace semiform {

struct ComponentParity {
  IndexSet vertices;
  bool bipartite = true;
  // Closed walk v0, v1, ..., v0 of odd length when not bipartite.
  std::vector<std::size_t> odd_cycle;
};

struct ParityReport {
  std::vector<ComponentParity> components;
  // BFS layer parity per vertex (0 or 1); meaningful on bipartite components.
  std::vector<int> color;

  bool bipartite() const;
};

ParityReport parity_report(const BaseGraph& g);

struct TensorPrediction {
  // Blocks of the product base (left-major positions), normalized.
  BasePartition partition;
  std::string reason;

  std::size_t components() const { return partition.size(); }
};

// Both factors indecomposable over an entire antiring, neither the rank-one
// zero form. Throws PreconditionError otherwise.
TensorPrediction predict_bilinear_tensor(const GramMatrix& b1, const GramMatrix& b2);

// Needs an entire antiring with NQL, (U, n(gamma)) and (V, q) indecomposable,
// gamma and q not the rank-one zero form, b balanced for q.
TensorPrediction predict_quadratic_tensor(const GramMatrix& gamma, const QuadraticScheme& q,
                                          const GramMatrix& b);

struct BlockPrediction {
  IndexSet block;  // component of (U, n(gamma))
  TensorPrediction prediction;  // positions in the full product base
};

// Splits (U, n(gamma)) into components and predicts each U_i (x)_b V.
std::vector<BlockPrediction> full_tensor_analysis(const GramMatrix& gamma, const QuadraticScheme& q,
                                                  const GramMatrix& b);

struct CrosscheckVerdict {
  bool match = false;
  BasePartition predicted;
  BasePartition actual;
};

CrosscheckVerdict oracle_crosscheck(const TensorPrediction& prediction, const Form& actual);
CrosscheckVerdict oracle_crosscheck(const std::vector<BlockPrediction>& predictions,
                                    const Form& actual);

}  // namespace semiform
