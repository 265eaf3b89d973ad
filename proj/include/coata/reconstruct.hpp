#pragma once

#include "coata/graph.hpp"
#include "coata/ppr.hpp"

#include <string>

namespace coata {

enum class ReconstructionStrategy { knn, edge_mod };

ReconstructionStrategy strategy_from_string(const std::string& s);
std::string to_string(ReconstructionStrategy s);

struct ReconstructionConfig {
  ReconstructionStrategy strategy = ReconstructionStrategy::knn;
  /// Neighbors kept per node for knn; 0 picks round(2m/n) from the input so
  /// the rebuilt graph lands near the original edge count.
  Index k = 0;
  Index k_add = 5;
  Index k_del = 5;

  void validate() const;
};

/// Counters surfaced to the caller for logging. clipped_nodes counts nodes
/// whose request exceeded the available candidates (or, for deletions, the
/// node degree) and was silently reduced.
struct ReconstructionReport {
  Index k_used = 0;
  Index edges_added = 0;
  Index edges_removed = 0;
  Index clipped_nodes = 0;
};

/// Rebuilds the topology from per-source PPR score lists.
///
/// knn: each node nominates its top-k targets by score (ties to the smaller
/// id, already encoded in ScoreTable order); the union of nominations is
/// symmetrized, all weights 1.
///
/// edge_mod: each node nominates its k_add best-scoring non-neighbors for
/// addition (union over endpoints, then symmetrized, weight 1) and its k_del
/// worst-scoring current neighbors for deletion. An edge is deleted only when
/// both endpoints nominate it, which caps deletions touching any node at
/// k_del. Neighbors missing from the truncated score list rank as score 0.
///
/// scores must have one entry per node. Throws InputError otherwise.
SparseGraph reconstruct(const SparseGraph& original, const ScoreTable& scores,
                        const ReconstructionConfig& cfg,
                        ReconstructionReport* report = nullptr);

}  // namespace coata
