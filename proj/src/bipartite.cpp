#include "coata/bipartite.hpp"

#include <cmath>

namespace coata {

BipartiteGraph build_bipartite(const EnrichedFeatures& h, const BipartiteBuildOptions& opts) {
  const Matrix& m = h.h_matrix;
  if (!m.allFinite()) throw InputError("build_bipartite: non-finite feature input");
  const Index n = m.rows();
  const Index k = m.cols();

  BipartiteGraph g;
  g.n_v_ = n;
  g.by_node_.resize(static_cast<size_t>(n));
  g.node_degree_ = Vector::Zero(n);
  std::vector<double> attr_degrees;

  for (Index col = 0; col < k; ++col) {
    Index touched = 0;
    for (Index row = 0; row < n; ++row) {
      double w = m(row, col);
      if (w < 0.0) {
        g.clamped_negatives_++;
        w = 0.0;
      }
      if (w > 0.0) ++touched;
    }
    if (touched == 0) continue;  // zero-dimension removal
    double scale = 1.0;
    if (touched == 1) {
      if (opts.singleton_policy == SingletonPolicy::drop) continue;
      scale = 0.1;  // singleton down-weighting
    }
    const Index attr = g.n_u_++;
    g.attr_column_.push_back(col);
    g.by_attr_.emplace_back();
    double attr_deg = 0.0;
    for (Index row = 0; row < n; ++row) {
      double w = std::max(m(row, col), 0.0);
      if (w <= 0.0) continue;
      w *= scale;
      g.by_node_[row].push_back({attr, w});
      g.by_attr_[attr].push_back({row, w});
      g.node_degree_[row] += w;
      attr_deg += w;
      g.arc_count_++;
    }
    attr_degrees.push_back(attr_deg);
  }

  if (g.n_u_ == 0)
    throw InputError("build_bipartite: every feature dimension was removed by preprocessing");
  g.attr_degree_ = Eigen::Map<const Vector>(attr_degrees.data(), static_cast<Index>(attr_degrees.size()));
  return g;
}

}  // namespace coata
