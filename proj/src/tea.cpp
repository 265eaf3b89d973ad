#include "coata/tea.hpp"

#include "coata/oracles.hpp"

namespace coata {

EnrichedFeatures propagate(const Matrix& x, const NormalizedAdjacency& adj, const TeaConfig& cfg) {
  cfg.validate();
  if (x.rows() != adj.n)
    throw InputError("tea: feature rows " + std::to_string(x.rows()) +
                     " do not match graph n=" + std::to_string(adj.n));
  if (!x.allFinite()) throw InputError("tea: non-finite feature input");

  Matrix cur = x;
  for (int l = 1; l <= cfg.h; ++l)
    cur = (1.0 - cfg.beta) * (adj.matrix * cur) + cfg.beta * x;
  return {std::move(cur), cfg.h};
}

Matrix fixed_point(const Matrix& x, const NormalizedAdjacency& adj, double beta,
                   Index max_dense_dim) {
  if (!(beta > 0.0 && beta <= 1.0))
    throw InputError("fixed_point: beta must lie in (0, 1], got " + format_double(beta));
  OracleBudget budget;
  budget.max_dense_dim = max_dense_dim;
  Matrix star = oracles::dense_fixed_point(x, adj, beta, budget);
  const double residual =
      (star - (1.0 - beta) * (adj.matrix * star) - beta * x).cwiseAbs().maxCoeff();
  if (residual > 1e-10)
    throw InternalError("fixed_point: solve residual " + format_double(residual) + " exceeds 1e-10");
  return star;
}

double homophily_schedule(double p0, double beta, int l) {
  if (!(p0 >= 0.0 && p0 <= 1.0)) throw InputError("homophily_schedule: p0 must lie in [0, 1]");
  if (!(beta >= 0.0 && beta <= 1.0)) throw InputError("homophily_schedule: beta must lie in [0, 1]");
  if (l < 0) throw InputError("homophily_schedule: l must be >= 0");
  double p = p0;
  for (int i = 0; i < l; ++i) p = beta + (1.0 - beta) * p;
  return p;
}

}  // namespace coata
