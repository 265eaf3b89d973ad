#pragma once

#include "coata/types.hpp"

#include <string>
#include <vector>

namespace coata {

/// One undirected edge, stored once per direction inside SparseGraph.
struct Edge {
  Index u = 0;
  Index v = 0;
  double w = 1.0;
};

/// Symmetric weighted graph over dense node ids [0, n). Edges are kept in
/// both directions, sorted by (u, v), with no self-loops and strictly
/// positive weights. Immutable after construction.
class SparseGraph {
 public:
  SparseGraph() = default;

  /// Builds from an undirected edge list (each pair listed once, u != v).
  /// Symmetrizes, sorts, computes weighted degrees and validates invariants.
  static SparseGraph from_undirected_edges(Index n, std::vector<Edge> edges);

  Index num_nodes() const { return n_; }
  /// Number of undirected edges.
  Index num_edges() const { return static_cast<Index>(directed_.size()) / 2; }
  /// Both directions, sorted by (u, v).
  const std::vector<Edge>& directed_edges() const { return directed_; }
  /// Weighted degree d(u) = sum of incident edge weights.
  const Vector& degrees() const { return degree_; }

  /// Neighbors of u as a (begin, end) range into directed_edges().
  std::pair<const Edge*, const Edge*> neighbors(Index u) const {
    return {directed_.data() + offsets_[u], directed_.data() + offsets_[u + 1]};
  }

  bool has_edge(Index u, Index v) const;

 private:
  Index n_ = 0;
  std::vector<Edge> directed_;       // both directions, sorted by (u, v)
  std::vector<Index> offsets_;       // n+1 row offsets into directed_
  Vector degree_;
};

/// Propagation matrix D^{-1/2} (A + I) D^{-1/2} with D = deg + I,
/// kept as an Eigen sparse matrix so products read as plain expressions.
struct NormalizedAdjacency {
  Index n = 0;
  SpMatrix matrix;  // symmetric, strictly positive diagonal
};

/// Builds the self-loop-augmented symmetric normalization of g.
/// Rejects empty graphs.
NormalizedAdjacency normalize(const SparseGraph& g);

/// Sparse-dense product adj * x. Throws on row mismatch or non-finite input.
Matrix spmm(const NormalizedAdjacency& adj, const Matrix& x);

/// Power-iteration estimate of ||adj||_2 (>= 100 steps recommended).
double estimate_spectral_norm(const NormalizedAdjacency& adj, int steps, std::uint64_t seed);

enum class Split : std::uint8_t { none, train, val, test };

/// Per-node class labels (-1 = unlabeled) and train/val/test assignment.
struct LabelSet {
  std::vector<int> labels;
  int num_classes = 0;
  std::vector<Split> splits;

  Index size() const { return static_cast<Index>(labels.size()); }
  /// Throws InternalError when a split node lacks a label or c < 2.
  void validate() const;
  std::vector<Index> nodes_in(Split s) const;
};

/// Result of reading an edge-list file: graph plus the mapping from the
/// file's original node ids to the dense ids used internally.
struct LoadedGraph {
  SparseGraph graph;
  std::vector<Index> original_ids;  // dense id -> original id
};

/// Raw "u<TAB>v[<TAB>w]" lines with their 1-based line numbers, '#' comments
/// and blank lines skipped. No validation beyond the line grammar.
struct ParsedEdges {
  std::vector<Edge> edges;
  std::vector<int> lines;
};
ParsedEdges parse_edge_file(const std::string& path);

/// Reads "u<TAB>v[<TAB>w]" lines, '#' comments ignored. Arbitrary ids are
/// remapped to dense ids (ascending original order). Duplicate undirected
/// pairs and self-loops are rejected with the offending line number.
LoadedGraph load_edge_list(const std::string& path);

/// Same parser over explicit (id, id, w) triples when ids are already dense
/// [0, n); used by the dataset loader. line_numbers, when given, is used
/// for error messages.
SparseGraph edges_from_triples(Index n, const std::vector<Edge>& raw,
                               const std::vector<int>* line_numbers = nullptr);

/// Canonical serialization: one line "u<TAB>v<TAB>w" per undirected edge,
/// u < v, sorted, shortest round-trip float format. load(save(g)) == g and
/// save(load(f)) == f byte-for-byte for canonical files.
void save_edge_list(const SparseGraph& g, const std::string& path);
std::string edge_list_string(const SparseGraph& g);

/// Shortest decimal form that round-trips to the same double.
std::string format_double(double v);

}  // namespace coata
