#include "coata/reconstruct.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_map>
#include <utility>

namespace coata {

ReconstructionStrategy strategy_from_string(const std::string& s) {
  if (s == "knn") return ReconstructionStrategy::knn;
  if (s == "edge_mod") return ReconstructionStrategy::edge_mod;
  throw InputError("unknown reconstruction strategy '" + s + "' (expected knn or edge_mod)");
}

std::string to_string(ReconstructionStrategy s) {
  return s == ReconstructionStrategy::knn ? "knn" : "edge_mod";
}

void ReconstructionConfig::validate() const {
  if (k < 0) throw InputError("reconstruction: k must be >= 0");
  if (k_add < 0 || k_del < 0) throw InputError("reconstruction: k_add/k_del must be >= 0");
}

namespace {

using Pair = std::pair<Index, Index>;

Pair ordered(Index a, Index b) { return a < b ? Pair{a, b} : Pair{b, a}; }

SparseGraph knn_graph(const SparseGraph& original, const ScoreTable& scores, Index k,
                      ReconstructionReport& report) {
  const Index n = original.num_nodes();
  std::set<Pair> picked;
  for (Index s = 0; s < n; ++s) {
    const auto& list = scores[static_cast<size_t>(s)];
    if (static_cast<Index>(list.size()) < k) ++report.clipped_nodes;
    const Index take = std::min<Index>(k, static_cast<Index>(list.size()));
    for (Index i = 0; i < take; ++i) picked.insert(ordered(s, list[static_cast<size_t>(i)].target));
  }
  std::vector<Edge> edges;
  edges.reserve(picked.size());
  for (const auto& [u, v] : picked) edges.push_back({u, v, 1.0});
  report.edges_added = static_cast<Index>(edges.size());
  return SparseGraph::from_undirected_edges(n, std::move(edges));
}

SparseGraph edge_mod_graph(const SparseGraph& original, const ScoreTable& scores,
                           const ReconstructionConfig& cfg, ReconstructionReport& report) {
  const Index n = original.num_nodes();

  std::set<Pair> additions;       // undirected, enters on either endpoint's vote
  std::set<Pair> deletion_votes;  // directed (from, to)

  for (Index s = 0; s < n; ++s) {
    const auto& list = scores[static_cast<size_t>(s)];

    if (cfg.k_add > 0) {
      Index taken = 0;
      for (const auto& e : list) {
        if (taken == cfg.k_add) break;
        if (original.has_edge(s, e.target)) continue;
        additions.insert(ordered(s, e.target));
        ++taken;
      }
      if (taken < cfg.k_add) ++report.clipped_nodes;
    }

    if (cfg.k_del > 0) {
      std::unordered_map<Index, double> score_of;
      score_of.reserve(list.size());
      for (const auto& e : list) score_of.emplace(e.target, e.score);
      auto [begin, end] = original.neighbors(s);
      std::vector<std::pair<double, Index>> ranked;  // (score asc, id asc)
      ranked.reserve(static_cast<size_t>(end - begin));
      for (const Edge* e = begin; e != end; ++e) {
        auto it = score_of.find(e->v);
        ranked.emplace_back(it == score_of.end() ? 0.0 : it->second, e->v);
      }
      if (static_cast<Index>(ranked.size()) < cfg.k_del) ++report.clipped_nodes;
      const Index take = std::min<Index>(cfg.k_del, static_cast<Index>(ranked.size()));
      std::partial_sort(ranked.begin(), ranked.begin() + take, ranked.end());
      for (Index i = 0; i < take; ++i)
        deletion_votes.insert({s, ranked[static_cast<size_t>(i)].second});
    }
  }

  // An edge goes only when both endpoints rank it in their bottom k_del, so
  // no node can lose more than k_del edges.
  std::set<Pair> deletions;
  for (const auto& [u, v] : deletion_votes)
    if (u < v && deletion_votes.count({v, u})) deletions.insert({u, v});

  std::vector<Edge> edges;
  edges.reserve(static_cast<size_t>(original.num_edges()) + additions.size());
  for (const Edge& e : original.directed_edges()) {
    if (e.u >= e.v) continue;
    if (deletions.count({e.u, e.v})) continue;
    edges.push_back(e);
  }
  for (const auto& [u, v] : additions) edges.push_back({u, v, 1.0});

  report.edges_added = static_cast<Index>(additions.size());
  report.edges_removed = static_cast<Index>(deletions.size());
  return SparseGraph::from_undirected_edges(n, std::move(edges));
}

}  // namespace

SparseGraph reconstruct(const SparseGraph& original, const ScoreTable& scores,
                        const ReconstructionConfig& cfg, ReconstructionReport* report) {
  cfg.validate();
  const Index n = original.num_nodes();
  if (n == 0) throw InputError("reconstruct: empty graph");
  if (static_cast<Index>(scores.size()) != n)
    throw InputError("reconstruct: score table covers " + std::to_string(scores.size()) +
                     " sources, graph has " + std::to_string(n) + " nodes");

  ReconstructionReport local;
  ReconstructionReport& rep = report ? *report : local;
  rep = ReconstructionReport{};

  if (cfg.strategy == ReconstructionStrategy::knn) {
    Index k = cfg.k;
    if (k == 0)
      k = static_cast<Index>(
          std::llround(2.0 * static_cast<double>(original.num_edges()) / static_cast<double>(n)));
    rep.k_used = k;
    return knn_graph(original, scores, k, rep);
  }
  rep.k_used = 0;
  return edge_mod_graph(original, scores, cfg, rep);
}

}  // namespace coata
