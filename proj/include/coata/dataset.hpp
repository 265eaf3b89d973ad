#pragma once

#include "coata/graph.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace coata {

struct Provenance {
  std::string dir;
  /// filename -> FNV-1a 64-bit hash of the raw bytes, lowercase hex.
  std::vector<std::pair<std::string, std::string>> file_hashes;
};

struct Dataset {
  std::string name;
  SparseGraph graph;
  Matrix features;  // n x k dense
  LabelSet labels;
  Provenance provenance;

  Index num_nodes() const { return graph.num_nodes(); }
  Index feature_dim() const { return features.cols(); }
  /// Cross-checks that n agrees everywhere.
  void validate() const;
};

/// Reads edges.tsv, features.tsv, labels.tsv, splits.tsv from dir. Node ids
/// must already be dense [0, n) with n taken from the feature file. Datasets
/// whose directory name matches a published benchmark get their (n, m, c, k)
/// compared against the known statistics; mismatches land in *warnings.
///
/// features.tsv: either sparse triplets "node<TAB>dim<TAB>value" under a
/// "#n=<n> k=<k>" header, or headerless dense CSV (one row per node).
/// labels.tsv: "node<TAB>class"; unlisted nodes stay unlabeled.
/// splits.tsv: "node<TAB>{train|val|test}"; unlisted nodes are held out.
Dataset load_dataset(const std::string& dir, std::vector<std::string>* warnings = nullptr);

/// Canonical re-serialization of the four files; save(load(dir)) writes
/// byte-identical files for inputs that were canonical to begin with.
void save_dataset(const Dataset& d, const std::string& dir);

struct SbmSpec {
  Index n = 400;
  int c = 2;
  double p_in = 0.05;
  double p_out = 0.01;
  Index feature_dim = 16;
  double feature_noise = 0.5;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Planted-partition graph with per-class centroid features. Classes split
/// the id range into c contiguous blocks (remainder joins the last class);
/// features are the class's one-hot dimension block plus clamped Gaussian
/// noise; the first 20 nodes of each class train, the next 30 validate, the
/// rest test. Throws when a class is too small for that split.
Dataset generate_sbm(const SbmSpec& spec);

/// Fraction of edges joining same-label endpoints.
double edge_homophily(const SparseGraph& g, const LabelSet& labels);

/// FNV-1a 64-bit over a byte string, lowercase hex.
std::string fnv1a_hex(const std::string& bytes);

}  // namespace coata
