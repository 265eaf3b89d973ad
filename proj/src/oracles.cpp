#include "coata/oracles.hpp"

#include <Eigen/LU>

#include <cmath>

namespace coata::oracles {

Matrix dense_normalize(Index n, const std::vector<Edge>& undirected_edges) {
  Matrix a = Matrix::Zero(n, n);
  for (const Edge& e : undirected_edges) {
    a(e.u, e.v) = e.w;
    a(e.v, e.u) = e.w;
  }
  Matrix a_hat = a + Matrix::Identity(n, n);
  Vector d_hat = a.rowwise().sum() + Vector::Ones(n);
  Matrix out(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) out(i, j) = a_hat(i, j) / std::sqrt(d_hat[i] * d_hat[j]);
  return out;
}

Matrix dense_fixed_point(const Matrix& x, const NormalizedAdjacency& adj, double beta,
                         const OracleBudget& budget) {
  budget.validate();
  if (adj.n > budget.max_dense_dim)
    throw InputError("dense_fixed_point: n=" + std::to_string(adj.n) + " exceeds dense cap " +
                     std::to_string(budget.max_dense_dim));
  if (!(beta > 0.0 && beta <= 1.0))
    throw InputError("dense_fixed_point: beta must lie in (0, 1]");
  Matrix system = Matrix::Identity(adj.n, adj.n) - (1.0 - beta) * Matrix(adj.matrix);
  Eigen::PartialPivLU<Matrix> lu(system);
  Matrix star = lu.solve(beta * x);
  if (!star.allFinite())
    throw InternalError("dense_fixed_point: singular system produced non-finite solution");
  return star;
}

Vector dense_two_hop_ppr(const BipartiteGraph& g, Index source, double alpha, int iters,
                         const OracleBudget& budget) {
  budget.validate();
  const Index n_v = g.num_nodes();
  const Index n_u = g.num_attributes();
  if (n_v + n_u > budget.max_dense_dim)
    throw InputError("dense_two_hop_ppr: total vertices " + std::to_string(n_v + n_u) +
                     " exceed dense cap " + std::to_string(budget.max_dense_dim));
  if (source < 0 || source >= n_v) throw InputError("dense_two_hop_ppr: source out of range");
  if (!(alpha > 0.0 && alpha < 1.0)) throw InputError("dense_two_hop_ppr: alpha out of range");

  Vector pi = Vector::Zero(n_v);
  if (g.node_degree(source) <= 0.0) {
    pi[source] = 1.0;
    return pi;
  }

  // Row-stochastic transition blocks built densely from the arc lists.
  Matrix v_to_u = Matrix::Zero(n_v, n_u);
  Matrix u_to_v = Matrix::Zero(n_u, n_v);
  for (Index v = 0; v < n_v; ++v)
    for (const auto& arc : g.node_arcs(v)) v_to_u(v, arc.to) = arc.w / g.node_degree(v);
  for (Index a = 0; a < n_u; ++a)
    for (const auto& arc : g.attr_arcs(a)) u_to_v(a, arc.to) = arc.w / g.attr_degree(a);

  Eigen::RowVectorXd mass = Eigen::RowVectorXd::Zero(n_v);
  mass[source] = 1.0;
  double decay = 1.0;
  for (int k = 0; k <= iters; ++k) {
    pi += alpha * decay * mass.transpose();
    if (k == iters) break;
    mass = (mass * v_to_u) * u_to_v;
    decay *= 1.0 - alpha;
  }
  return pi;
}

namespace {

long walk_dfs(const BipartiteGraph& g, Index from, Index target, int remaining, long max_paths,
              long& used) {
  if (remaining == 0) return from == target ? 1 : 0;
  long total = 0;
  for (const auto& to_attr : g.node_arcs(from)) {
    for (const auto& to_node : g.attr_arcs(to_attr.to)) {
      if (++used > max_paths) throw InputError("enumerate_paths: budget exceeded");
      total += walk_dfs(g, to_node.to, target, remaining - 1, max_paths, used);
    }
  }
  return total;
}

}  // namespace

long enumerate_paths(const BipartiteGraph& g, Index source, Index target, int c,
                     const OracleBudget& budget) {
  budget.validate();
  if (c < 0) throw InputError("enumerate_paths: c must be >= 0");
  if (source < 0 || source >= g.num_nodes() || target < 0 || target >= g.num_nodes())
    throw InputError("enumerate_paths: source/target out of range");
  long used = 0;
  return walk_dfs(g, source, target, c, budget.max_paths, used);
}

std::vector<Matrix> finite_diff_grad(const std::function<double()>& f,
                                     const std::vector<Matrix*>& params, double fd_step) {
  if (!(fd_step > 0.0)) throw InputError("finite_diff_grad: step must be > 0");
  std::vector<Matrix> grads;
  grads.reserve(params.size());
  for (Matrix* p : params) {
    Matrix g(p->rows(), p->cols());
    for (Index j = 0; j < p->cols(); ++j) {
      for (Index i = 0; i < p->rows(); ++i) {
        const double saved = (*p)(i, j);
        (*p)(i, j) = saved + fd_step;
        const double up = f();
        (*p)(i, j) = saved - fd_step;
        const double down = f();
        (*p)(i, j) = saved;
        if (!std::isfinite(up) || !std::isfinite(down))
          throw InternalError("finite_diff_grad: non-finite loss evaluation");
        g(i, j) = (up - down) / (2.0 * fd_step);
      }
    }
    grads.push_back(std::move(g));
  }
  return grads;
}

Matrix dense_gcn_probs(const Matrix& dense_adj, const Matrix& x, const Matrix& w1,
                       const Matrix& w2) {
  Matrix hidden = (dense_adj * x * w1).cwiseMax(0.0);
  Matrix logits = dense_adj * hidden * w2;
  Matrix probs(logits.rows(), logits.cols());
  for (Index i = 0; i < logits.rows(); ++i) {
    const double m = logits.row(i).maxCoeff();
    Eigen::RowVectorXd e = (logits.row(i).array() - m).exp();
    probs.row(i) = e / e.sum();
  }
  return probs;
}

}  // namespace coata::oracles
