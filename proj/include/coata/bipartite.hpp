#pragma once

#include "coata/tea.hpp"

#include <vector>

namespace coata {

enum class SingletonPolicy : std::uint8_t {
  drop,        // remove attributes touching fewer than 2 nodes
  downweight,  // keep them, multiply their weights by 0.1
};

struct BipartiteBuildOptions {
  SingletonPolicy singleton_policy = SingletonPolicy::drop;
};

/// Node-attribute bipartite graph. Left side V = graph nodes, right side
/// U = retained feature dimensions, edge weight w(a, v) = H_{va}. Stored as
/// adjacency on both sides with weighted degrees. Immutable after build.
class BipartiteGraph {
 public:
  struct Arc {
    Index to;  // attribute id from a node row, node id from an attribute row
    double w;
  };

  Index num_nodes() const { return n_v_; }
  Index num_attributes() const { return n_u_; }
  Index num_arcs() const { return arc_count_; }

  const std::vector<Arc>& node_arcs(Index v) const { return by_node_[v]; }
  const std::vector<Arc>& attr_arcs(Index a) const { return by_attr_[a]; }

  /// Weighted degree over V / over U.
  double node_degree(Index v) const { return node_degree_[v]; }
  double attr_degree(Index a) const { return attr_degree_[a]; }
  const Vector& node_degrees() const { return node_degree_; }
  const Vector& attr_degrees() const { return attr_degree_; }

  /// Original feature dimension behind retained attribute a.
  Index attr_column(Index a) const { return attr_column_[a]; }

  /// Number of negative H entries clamped to zero during construction.
  long clamped_negatives() const { return clamped_negatives_; }

  friend BipartiteGraph build_bipartite(const EnrichedFeatures& h, const BipartiteBuildOptions&);

 private:
  Index n_v_ = 0;
  Index n_u_ = 0;
  Index arc_count_ = 0;
  std::vector<std::vector<Arc>> by_node_;
  std::vector<std::vector<Arc>> by_attr_;
  Vector node_degree_;
  Vector attr_degree_;
  std::vector<Index> attr_column_;
  long clamped_negatives_ = 0;
};

/// Projects enriched features H into the bipartite graph: clamps negative
/// entries to zero (counted), drops all-zero columns, then applies the
/// singleton policy to columns touching a single node. Throws InputError
/// when no attribute survives.
BipartiteGraph build_bipartite(const EnrichedFeatures& h,
                               const BipartiteBuildOptions& opts = {});

}  // namespace coata
