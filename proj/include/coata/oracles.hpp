#pragma once

#include "coata/bipartite.hpp"
#include "coata/graph.hpp"

#include <functional>
#include <vector>

namespace coata {

/// Size limits for the brute-force reference paths. Oracles refuse inputs
/// beyond these rather than running unbounded.
struct OracleBudget {
  Index max_dense_dim = 2000;
  long max_paths = 10'000'000;
  double fd_step = 1e-5;

  void validate() const {
    if (max_dense_dim <= 0 || max_paths <= 0)
      throw InputError("oracle budget: limits must be positive");
    if (!(fd_step >= 1e-8 && fd_step <= 1e-3))
      throw InputError("oracle budget: fd_step must lie in [1e-8, 1e-3]");
  }
};

namespace oracles {

/// Dense construction of D^{-1/2}(A+I)D^{-1/2} straight from the edge list,
/// sharing nothing with normalize().
Matrix dense_normalize(Index n, const std::vector<Edge>& undirected_edges);

/// Dense LU solve of X* = beta (I - (1-beta) adj)^{-1} X.
Matrix dense_fixed_point(const Matrix& x, const NormalizedAdjacency& adj, double beta,
                         const OracleBudget& budget = {});

/// Reference bipartite PPR: pi = alpha * sum_k (1-alpha)^k (M_VU M_UV)^k e_s
/// by dense power iteration; truncation error <= (1-alpha)^iters.
Vector dense_two_hop_ppr(const BipartiteGraph& g, Index source, double alpha, int iters,
                         const OracleBudget& budget = {});

/// Exact count of alternating length-2c walks source -> target.
long enumerate_paths(const BipartiteGraph& g, Index source, Index target, int c,
                     const OracleBudget& budget = {});

/// Central finite differences of f over every entry of every listed matrix.
/// f is evaluated with the matrices temporarily perturbed in place, so it
/// must read them through the same pointers and be deterministic.
std::vector<Matrix> finite_diff_grad(const std::function<double()>& f,
                                     const std::vector<Matrix*>& params, double fd_step);

/// Dense reference of the two-layer graph convolution forward pass; returns
/// row-softmax probabilities. Independent of the production implementation.
Matrix dense_gcn_probs(const Matrix& dense_adj, const Matrix& x, const Matrix& w1,
                       const Matrix& w2);

}  // namespace oracles
}  // namespace coata
