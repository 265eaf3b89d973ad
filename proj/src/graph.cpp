#include "coata/graph.hpp"

#include "coata/rng.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <tuple>

namespace coata {

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

SparseGraph SparseGraph::from_undirected_edges(Index n, std::vector<Edge> edges) {
  SparseGraph g;
  g.n_ = n;
  g.directed_.reserve(edges.size() * 2);
  for (const Edge& e : edges) {
    if (e.u < 0 || e.u >= n || e.v < 0 || e.v >= n)
      throw InputError("edge endpoint out of range: (" + std::to_string(e.u) + ", " +
                       std::to_string(e.v) + ") with n=" + std::to_string(n));
    if (e.u == e.v)
      throw InputError("self-loop on node " + std::to_string(e.u) + " is not allowed");
    if (!(e.w > 0.0) || !std::isfinite(e.w))
      throw InputError("edge (" + std::to_string(e.u) + ", " + std::to_string(e.v) +
                       ") has non-positive or non-finite weight");
    g.directed_.push_back(e);
    g.directed_.push_back({e.v, e.u, e.w});
  }
  std::sort(g.directed_.begin(), g.directed_.end(),
            [](const Edge& a, const Edge& b) { return std::tie(a.u, a.v) < std::tie(b.u, b.v); });
  for (size_t i = 1; i < g.directed_.size(); ++i) {
    if (g.directed_[i].u == g.directed_[i - 1].u && g.directed_[i].v == g.directed_[i - 1].v)
      throw InputError("duplicate edge (" + std::to_string(g.directed_[i].u) + ", " +
                       std::to_string(g.directed_[i].v) + ")");
  }
  g.offsets_.assign(static_cast<size_t>(n) + 1, 0);
  for (const Edge& e : g.directed_) g.offsets_[static_cast<size_t>(e.u) + 1]++;
  for (Index i = 0; i < n; ++i) g.offsets_[i + 1] += g.offsets_[i];
  g.degree_ = Vector::Zero(n);
  for (const Edge& e : g.directed_) g.degree_[e.u] += e.w;
  return g;
}

bool SparseGraph::has_edge(Index u, Index v) const {
  auto [begin, end] = neighbors(u);
  return std::any_of(begin, end, [v](const Edge& e) { return e.v == v; });
}

NormalizedAdjacency normalize(const SparseGraph& g) {
  const Index n = g.num_nodes();
  if (n == 0) throw InputError("cannot normalize an empty graph");
  Vector inv_sqrt(n);
  for (Index i = 0; i < n; ++i) inv_sqrt[i] = 1.0 / std::sqrt(g.degrees()[i] + 1.0);

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(g.directed_edges().size() + static_cast<size_t>(n));
  for (const Edge& e : g.directed_edges())
    triplets.emplace_back(e.u, e.v, e.w * inv_sqrt[e.u] * inv_sqrt[e.v]);
  for (Index i = 0; i < n; ++i) triplets.emplace_back(i, i, inv_sqrt[i] * inv_sqrt[i]);

  NormalizedAdjacency adj;
  adj.n = n;
  adj.matrix.resize(n, n);
  adj.matrix.setFromTriplets(triplets.begin(), triplets.end());
  adj.matrix.makeCompressed();
  return adj;
}

Matrix spmm(const NormalizedAdjacency& adj, const Matrix& x) {
  if (x.rows() != adj.n)
    throw InputError("spmm: row mismatch, adjacency has n=" + std::to_string(adj.n) +
                     " but features have " + std::to_string(x.rows()) + " rows");
  if (!x.allFinite()) throw InputError("spmm: non-finite feature input");
  return adj.matrix * x;
}

double estimate_spectral_norm(const NormalizedAdjacency& adj, int steps, std::uint64_t seed) {
  Rng rng(seed);
  Vector v(adj.n);
  for (Index i = 0; i < adj.n; ++i) v[i] = rng.uniform(-1.0, 1.0);
  v.normalize();
  double norm = 0.0;
  for (int s = 0; s < steps; ++s) {
    Vector w = adj.matrix * v;
    norm = w.norm();
    if (norm == 0.0) return 0.0;
    v = w / norm;
  }
  return norm;
}

void LabelSet::validate() const {
  if (labels.size() != splits.size())
    throw InternalError("label/split size mismatch");
  if (num_classes < 2) throw InternalError("label set needs at least 2 classes");
  for (size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] >= num_classes)
      throw InternalError("node " + std::to_string(i) + " has class id " +
                          std::to_string(labels[i]) + " >= c=" + std::to_string(num_classes));
    if (splits[i] != Split::none && labels[i] < 0)
      throw InternalError("node " + std::to_string(i) + " is in a split but has no label");
  }
}

std::vector<Index> LabelSet::nodes_in(Split s) const {
  std::vector<Index> out;
  for (size_t i = 0; i < splits.size(); ++i)
    if (splits[i] == s) out.push_back(static_cast<Index>(i));
  return out;
}

ParsedEdges parse_edge_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open edge list: " + path);
  ParsedEdges out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    size_t start = line.find_first_not_of(" \t");
    if (start == std::string::npos || line[start] == '#') continue;
    std::istringstream ls(line);
    Index u, v;
    double w = 1.0;
    if (!(ls >> u >> v))
      throw InputError(path + ":" + std::to_string(lineno) + ": expected \"u<TAB>v[<TAB>w]\", got \"" + line + "\"");
    if (!(ls >> w)) {
      w = 1.0;
    } else {
      std::string extra;
      if (ls >> extra)
        throw InputError(path + ":" + std::to_string(lineno) + ": trailing field \"" + extra +
                         "\" after weight");
    }
    out.edges.push_back({u, v, w});
    out.lines.push_back(lineno);
  }
  return out;
}

LoadedGraph load_edge_list(const std::string& path) {
  ParsedEdges raw = parse_edge_file(path);

  std::map<Index, Index> remap;  // original id -> dense id, ascending
  for (const auto& e : raw.edges) {
    remap.emplace(e.u, 0);
    remap.emplace(e.v, 0);
  }
  Index next = 0;
  for (auto& [orig, dense] : remap) dense = next++;

  std::vector<Edge> edges;
  edges.reserve(raw.edges.size());
  for (const auto& e : raw.edges) edges.push_back({remap[e.u], remap[e.v], e.w});

  LoadedGraph result;
  result.original_ids.resize(static_cast<size_t>(next));
  for (const auto& [orig, dense] : remap) result.original_ids[dense] = orig;
  result.graph = edges_from_triples(next, edges, &raw.lines);
  return result;
}

SparseGraph edges_from_triples(Index n, const std::vector<Edge>& raw,
                               const std::vector<int>* line_numbers) {
  // Detect duplicates of the unordered pair before symmetrizing so the error
  // can name the input line.
  std::map<std::pair<Index, Index>, int> seen;
  std::vector<Edge> undirected;
  undirected.reserve(raw.size());
  for (size_t i = 0; i < raw.size(); ++i) {
    const Edge& e = raw[i];
    const int line = line_numbers ? (*line_numbers)[i] : static_cast<int>(i + 1);
    if (e.u == e.v)
      throw InputError("line " + std::to_string(line) + ": self-loop on node " + std::to_string(e.u));
    auto key = std::minmax(e.u, e.v);
    auto [it, inserted] = seen.emplace(std::make_pair(key.first, key.second), line);
    if (!inserted)
      throw InputError("line " + std::to_string(line) + ": duplicate edge (" + std::to_string(e.u) +
                       ", " + std::to_string(e.v) + "), first seen at line " +
                       std::to_string(it->second));
    undirected.push_back(e);
  }
  return SparseGraph::from_undirected_edges(n, std::move(undirected));
}

std::string edge_list_string(const SparseGraph& g) {
  std::string out;
  for (const Edge& e : g.directed_edges()) {
    if (e.u >= e.v) continue;
    out += std::to_string(e.u);
    out += '\t';
    out += std::to_string(e.v);
    out += '\t';
    out += format_double(e.w);
    out += '\n';
  }
  return out;
}

void save_edge_list(const SparseGraph& g, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write edge list: " + path);
  out << edge_list_string(g);
}

}  // namespace coata
