#include "coata/dataset.hpp"

#include "coata/rng.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

namespace coata {

namespace fs = std::filesystem;

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char b : bytes) {
    h ^= b;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void Dataset::validate() const {
  const Index n = graph.num_nodes();
  if (features.rows() != n)
    throw InputError(name + ": feature rows " + std::to_string(features.rows()) +
                     " != node count " + std::to_string(n));
  if (labels.size() != n)
    throw InputError(name + ": label count " + std::to_string(labels.size()) +
                     " != node count " + std::to_string(n));
  labels.validate();
}

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct KnownStats {
  Index n, m;
  int c;
  Index k;
};

const std::map<std::string, KnownStats>& known_benchmarks() {
  static const std::map<std::string, KnownStats> table = {
      {"cora", {2708, 5429, 7, 1433}},          {"citeseer", {3327, 4732, 6, 3703}},
      {"pubmed", {19717, 44338, 3, 500}},       {"coauthor-cs", {18333, 163788, 15, 6805}},
      {"coauthor-phy", {34493, 495924, 5, 8415}}, {"chameleon", {2277, 36101, 5, 2325}},
      {"squirrel", {5201, 217073, 5, 2089}},
  };
  return table;
}

/// Strips comments/blank lines, hands back (content, line number) pairs.
std::vector<std::pair<std::string, int>> data_lines(const std::string& text, bool keep_header) {
  std::vector<std::pair<std::string, int>> out;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    size_t start = line.find_first_not_of(" \t");
    if (start == std::string::npos) continue;
    if (line[start] == '#') {
      if (keep_header && out.empty() && line.compare(start, 3, "#n=") == 0)
        out.emplace_back(line.substr(start), lineno);
      continue;
    }
    out.emplace_back(line, lineno);
  }
  return out;
}

[[noreturn]] void parse_fail(const std::string& path, int line, const std::string& what) {
  throw InputError(path + ":" + std::to_string(line) + ": " + what);
}

Matrix parse_features(const std::string& path, const std::string& text) {
  auto lines = data_lines(text, /*keep_header=*/true);
  if (lines.empty()) throw InputError(path + ": empty feature file");

  if (lines.front().first.rfind("#n=", 0) == 0) {
    long long n = -1, k = -1;
    if (std::sscanf(lines.front().first.c_str(), "#n=%lld k=%lld", &n, &k) != 2 || n < 1 || k < 1)
      parse_fail(path, lines.front().second, "bad header, expected \"#n=<n> k=<k>\"");
    Matrix x = Matrix::Zero(n, k);
    Eigen::Matrix<char, Eigen::Dynamic, Eigen::Dynamic> seen =
        Eigen::Matrix<char, Eigen::Dynamic, Eigen::Dynamic>::Zero(n, k);
    for (size_t i = 1; i < lines.size(); ++i) {
      std::istringstream ls(lines[i].first);
      Index node, dim;
      double value;
      if (!(ls >> node >> dim >> value))
        parse_fail(path, lines[i].second, "expected \"node<TAB>dim<TAB>value\"");
      std::string extra;
      if (ls >> extra) parse_fail(path, lines[i].second, "trailing field \"" + extra + "\"");
      if (node < 0 || node >= n) parse_fail(path, lines[i].second, "node id out of range");
      if (dim < 0 || dim >= k) parse_fail(path, lines[i].second, "feature dim out of range");
      if (!std::isfinite(value)) parse_fail(path, lines[i].second, "non-finite value");
      if (seen(node, dim)) parse_fail(path, lines[i].second, "duplicate (node, dim) entry");
      seen(node, dim) = 1;
      x(node, dim) = value;
    }
    return x;
  }

  // Headerless dense CSV, one row per node.
  std::vector<std::vector<double>> rows;
  for (const auto& [line, lineno] : lines) {
    std::vector<double> row;
    size_t pos = 0;
    while (pos <= line.size()) {
      size_t comma = line.find(',', pos);
      std::string cell = line.substr(pos, comma == std::string::npos ? std::string::npos
                                                                     : comma - pos);
      try {
        size_t used = 0;
        row.push_back(std::stod(cell, &used));
        while (used < cell.size() && (cell[used] == ' ' || cell[used] == '\t')) ++used;
        if (used != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        parse_fail(path, lineno, "bad numeric cell \"" + cell + "\"");
      }
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    if (!rows.empty() && row.size() != rows.front().size())
      parse_fail(path, lineno, "row has " + std::to_string(row.size()) + " cells, expected " +
                                   std::to_string(rows.front().size()));
    rows.push_back(std::move(row));
  }
  Matrix x(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (Index i = 0; i < x.rows(); ++i)
    for (Index j = 0; j < x.cols(); ++j) x(i, j) = rows[static_cast<size_t>(i)][static_cast<size_t>(j)];
  return x;
}

std::vector<int> parse_labels(const std::string& path, const std::string& text, Index n,
                              int* num_classes) {
  std::vector<int> labels(static_cast<size_t>(n), -1);
  int max_class = -1;
  for (const auto& [line, lineno] : data_lines(text, false)) {
    std::istringstream ls(line);
    Index node;
    int cls;
    if (!(ls >> node >> cls)) parse_fail(path, lineno, "expected \"node<TAB>class\"");
    std::string extra;
    if (ls >> extra) parse_fail(path, lineno, "trailing field \"" + extra + "\"");
    if (node < 0 || node >= n) parse_fail(path, lineno, "node id out of range");
    if (cls < 0) parse_fail(path, lineno, "negative class id");
    if (labels[static_cast<size_t>(node)] != -1) parse_fail(path, lineno, "duplicate label for node");
    labels[static_cast<size_t>(node)] = cls;
    max_class = std::max(max_class, cls);
  }
  *num_classes = max_class + 1;
  return labels;
}

std::vector<Split> parse_splits(const std::string& path, const std::string& text, Index n) {
  std::vector<Split> splits(static_cast<size_t>(n), Split::none);
  for (const auto& [line, lineno] : data_lines(text, false)) {
    std::istringstream ls(line);
    Index node;
    std::string which;
    if (!(ls >> node >> which)) parse_fail(path, lineno, "expected \"node<TAB>{train|val|test}\"");
    std::string extra;
    if (ls >> extra) parse_fail(path, lineno, "trailing field \"" + extra + "\"");
    if (node < 0 || node >= n) parse_fail(path, lineno, "node id out of range");
    if (splits[static_cast<size_t>(node)] != Split::none)
      parse_fail(path, lineno, "duplicate split assignment for node");
    if (which == "train")
      splits[static_cast<size_t>(node)] = Split::train;
    else if (which == "val")
      splits[static_cast<size_t>(node)] = Split::val;
    else if (which == "test")
      splits[static_cast<size_t>(node)] = Split::test;
    else
      parse_fail(path, lineno, "unknown split \"" + which + "\"");
  }
  return splits;
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

}  // namespace

Dataset load_dataset(const std::string& dir, std::vector<std::string>* warnings) {
  Dataset d;
  d.name = fs::path(dir).filename().string();
  if (d.name.empty()) d.name = fs::path(dir).parent_path().filename().string();
  d.provenance.dir = dir;

  const std::string edges_path = (fs::path(dir) / "edges.tsv").string();
  const std::string features_path = (fs::path(dir) / "features.tsv").string();
  const std::string labels_path = (fs::path(dir) / "labels.tsv").string();
  const std::string splits_path = (fs::path(dir) / "splits.tsv").string();

  const std::string features_text = read_file(features_path);
  const std::string edges_text = read_file(edges_path);
  const std::string labels_text = read_file(labels_path);
  const std::string splits_text = read_file(splits_path);
  d.provenance.file_hashes = {{"edges.tsv", fnv1a_hex(edges_text)},
                              {"features.tsv", fnv1a_hex(features_text)},
                              {"labels.tsv", fnv1a_hex(labels_text)},
                              {"splits.tsv", fnv1a_hex(splits_text)}};

  d.features = parse_features(features_path, features_text);
  const Index n = d.features.rows();

  try {
    ParsedEdges raw = parse_edge_file(edges_path);
    d.graph = edges_from_triples(n, raw.edges, &raw.lines);
  } catch (const InputError& e) {
    std::string msg = e.what();
    if (msg.rfind(edges_path, 0) == 0) throw;  // already carries path:line
    throw InputError(edges_path + ": " + msg);
  }

  d.labels.labels = parse_labels(labels_path, labels_text, n, &d.labels.num_classes);
  d.labels.splits = parse_splits(splits_path, splits_text, n);
  d.validate();

  auto it = known_benchmarks().find(lower(d.name));
  if (it != known_benchmarks().end() && warnings) {
    const KnownStats& ref = it->second;
    auto check = [&](const std::string& what, long long got, long long want) {
      if (got != want)
        warnings->push_back(d.name + ": " + what + " is " + std::to_string(got) +
                            ", published statistics say " + std::to_string(want));
    };
    check("node count", n, ref.n);
    check("edge count", d.graph.num_edges(), ref.m);
    check("class count", d.labels.num_classes, ref.c);
    check("feature dim", d.features.cols(), ref.k);
  }
  return d;
}

void save_dataset(const Dataset& d, const std::string& dir) {
  d.validate();
  fs::create_directories(dir);

  save_edge_list(d.graph, (fs::path(dir) / "edges.tsv").string());

  {
    std::ofstream out(fs::path(dir) / "features.tsv", std::ios::binary);
    if (!out) throw InputError("cannot write features.tsv under " + dir);
    out << "#n=" << d.features.rows() << " k=" << d.features.cols() << "\n";
    for (Index i = 0; i < d.features.rows(); ++i)
      for (Index j = 0; j < d.features.cols(); ++j)
        if (d.features(i, j) != 0.0)
          out << i << '\t' << j << '\t' << format_double(d.features(i, j)) << '\n';
  }
  {
    std::ofstream out(fs::path(dir) / "labels.tsv", std::ios::binary);
    if (!out) throw InputError("cannot write labels.tsv under " + dir);
    for (Index i = 0; i < d.labels.size(); ++i)
      if (d.labels.labels[static_cast<size_t>(i)] >= 0)
        out << i << '\t' << d.labels.labels[static_cast<size_t>(i)] << '\n';
  }
  {
    std::ofstream out(fs::path(dir) / "splits.tsv", std::ios::binary);
    if (!out) throw InputError("cannot write splits.tsv under " + dir);
    for (Index i = 0; i < d.labels.size(); ++i) {
      const Split s = d.labels.splits[static_cast<size_t>(i)];
      if (s == Split::none) continue;
      out << i << '\t' << (s == Split::train ? "train" : s == Split::val ? "val" : "test") << '\n';
    }
  }
}

void SbmSpec::validate() const {
  if (n < 2) throw InputError("sbm: n must be >= 2");
  if (c < 2) throw InputError("sbm: c must be >= 2");
  if (n < c) throw InputError("sbm: n must be >= c");
  if (!(p_in >= 0.0 && p_in <= 1.0) || !(p_out >= 0.0 && p_out <= 1.0))
    throw InputError("sbm: probabilities must be in [0, 1]");
  if (feature_dim < c) throw InputError("sbm: feature_dim must be >= c");
  if (feature_noise < 0.0) throw InputError("sbm: feature_noise must be >= 0");
}

Dataset generate_sbm(const SbmSpec& spec) {
  spec.validate();
  const Index n = spec.n;
  const int c = spec.c;
  const Index block = n / c;

  auto class_of = [&](Index i) {
    const Index j = i / block;
    return static_cast<int>(std::min<Index>(j, c - 1));
  };
  for (int j = 0; j < c; ++j) {
    const Index size = j < c - 1 ? block : n - block * (c - 1);
    if (size < 51)
      throw InputError("sbm: class " + std::to_string(j) + " has " + std::to_string(size) +
                       " nodes, need at least 51 for the 20/30/rest split");
  }

  Rng rng(spec.seed);
  std::vector<Edge> edges;
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j)
      if (rng.bernoulli(class_of(i) == class_of(j) ? spec.p_in : spec.p_out))
        edges.push_back({i, j, 1.0});

  Dataset d;
  {
    std::ostringstream name;
    name << "sbm-n" << n << "-c" << c << "-seed" << spec.seed;
    d.name = name.str();
  }
  d.provenance.dir = "(generated)";
  {
    std::ostringstream desc;
    desc << "n=" << n << " c=" << c << " p_in=" << format_double(spec.p_in)
         << " p_out=" << format_double(spec.p_out) << " k=" << spec.feature_dim
         << " noise=" << format_double(spec.feature_noise) << " seed=" << spec.seed;
    d.provenance.file_hashes = {{"sbm-spec", desc.str()}};
  }
  d.graph = SparseGraph::from_undirected_edges(n, std::move(edges));

  const Index fblock = spec.feature_dim / c;
  d.features = Matrix::Zero(n, spec.feature_dim);
  for (Index i = 0; i < n; ++i) {
    const int cls = class_of(i);
    for (Index t = 0; t < fblock; ++t) d.features(i, cls * fblock + t) = 1.0;
    if (spec.feature_noise > 0.0)
      for (Index t = 0; t < spec.feature_dim; ++t)
        d.features(i, t) = std::max(0.0, d.features(i, t) + spec.feature_noise * rng.normal());
  }

  d.labels.num_classes = c;
  d.labels.labels.resize(static_cast<size_t>(n));
  d.labels.splits.assign(static_cast<size_t>(n), Split::test);
  std::vector<Index> seen_in_class(static_cast<size_t>(c), 0);
  for (Index i = 0; i < n; ++i) {
    const int cls = class_of(i);
    d.labels.labels[static_cast<size_t>(i)] = cls;
    Index& seen = seen_in_class[static_cast<size_t>(cls)];
    if (seen < 20)
      d.labels.splits[static_cast<size_t>(i)] = Split::train;
    else if (seen < 50)
      d.labels.splits[static_cast<size_t>(i)] = Split::val;
    ++seen;
  }
  d.validate();
  return d;
}

double edge_homophily(const SparseGraph& g, const LabelSet& labels) {
  if (g.num_edges() == 0) throw InputError("edge_homophily: graph has no edges");
  Index same = 0;
  for (const Edge& e : g.directed_edges()) {
    if (e.u >= e.v) continue;
    same += labels.labels[static_cast<size_t>(e.u)] == labels.labels[static_cast<size_t>(e.v)] ? 1 : 0;
  }
  return static_cast<double>(same) / static_cast<double>(g.num_edges());
}

}  // namespace coata
