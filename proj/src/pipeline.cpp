#include "coata/pipeline.hpp"

#include "coata/bipartite.hpp"
#include "coata/tea.hpp"

#include <fstream>
#include <sstream>

namespace coata {

AugmentationResult run_augmentation(const Dataset& data, const RunConfig& cfg) {
  cfg.validate();
  data.validate();

  NormalizedAdjacency adj = normalize(data.graph);
  EnrichedFeatures enriched = propagate(data.features, adj, cfg.tea());
  BipartiteGraph bip = build_bipartite(enriched, cfg.bipartite());

  AugmentationResult out;
  out.clamped_negatives = bip.clamped_negatives();
  out.attributes_kept = bip.num_attributes();
  out.scores = compute_score_table(bip, cfg.ppr(), cfg.top_t, cfg.workers, &out.total_pushes);
  out.knn = reconstruct(data.graph, out.scores, cfg.knn_reconstruction(), &out.knn_report);
  out.edge_mod =
      reconstruct(data.graph, out.scores, cfg.edge_mod_reconstruction(), &out.edge_mod_report);
  return out;
}

TrainingProducts run_training(const Dataset& data, const AugmentationResult& aug,
                              const RunConfig& cfg) {
  TrainingProducts out;
  out.adjacencies.push_back(normalize(data.graph));
  out.adjacencies.push_back(normalize(aug.knn));
  out.adjacencies.push_back(normalize(aug.edge_mod));

  std::vector<NormalizedAdjacency> augmented(out.adjacencies.begin() + 1, out.adjacencies.end());
  out.result = train(out.adjacencies.front(), augmented, data.features, data.labels, cfg.gnn(),
                     cfg.seed);
  if (out.result.diverged) return out;

  if (!data.labels.nodes_in(Split::test).empty()) {
    out.test_acc = cfg.ensemble_eval
                       ? evaluate_ensemble(out.result.params, out.adjacencies, data.features,
                                           data.labels, Split::test)
                       : evaluate(out.result.params, out.adjacencies.front(), data.features,
                                  data.labels, Split::test);
  }
  return out;
}

Dataset load_or_generate(const RunConfig& cfg, std::vector<std::string>* warnings) {
  if (cfg.data_dir.empty()) return generate_sbm(cfg.sbm());
  return load_dataset(cfg.data_dir, warnings);
}

std::string metrics_csv(const std::vector<EpochMetrics>& history) {
  std::string out = "epoch,ce,ce_aug,co,dpa,total,train_acc,val_acc\n";
  for (const EpochMetrics& em : history) {
    out += std::to_string(em.epoch);
    out += ',';
    out += format_double(em.losses.ce);
    out += ',';
    out += format_double(em.losses.ce_aug);
    out += ',';
    out += format_double(em.losses.co);
    out += ',';
    out += format_double(em.losses.dpa);
    out += ',';
    out += format_double(em.losses.total);
    out += ',';
    out += format_double(em.train_acc);
    out += ',';
    out += format_double(em.val_acc);
    out += '\n';
  }
  return out;
}

std::string embeddings_tsv(const Matrix& z) {
  std::string out;
  for (Index i = 0; i < z.rows(); ++i) {
    out += std::to_string(i);
    for (Index j = 0; j < z.cols(); ++j) {
      out += '\t';
      out += format_double(z(i, j));
    }
    out += '\n';
  }
  return out;
}

namespace {

void append_matrix(std::string& out, const char* name, const Matrix& m) {
  out += "#matrix ";
  out += name;
  out += ' ';
  out += std::to_string(m.rows());
  out += ' ';
  out += std::to_string(m.cols());
  out += '\n';
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j) out += '\t';
      out += format_double(m(i, j));
    }
    out += '\n';
  }
}

Matrix read_matrix(std::istream& in, const std::string& path, const char* name) {
  std::string line;
  if (!std::getline(in, line))
    throw InputError(path + ": truncated checkpoint, missing matrix " + name);
  std::istringstream header(line);
  std::string tag, got;
  Index rows = -1, cols = -1;
  header >> tag >> got >> rows >> cols;
  if (tag != "#matrix" || got != name || rows < 0 || cols < 0)
    throw InputError(path + ": expected '#matrix " + name + " <rows> <cols>', got '" + line + "'");
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    if (!std::getline(in, line)) throw InputError(path + ": truncated rows in matrix " + name);
    std::istringstream row(line);
    for (Index j = 0; j < cols; ++j)
      if (!(row >> m(i, j)))
        throw InputError(path + ": bad value at matrix " + name + " row " + std::to_string(i));
  }
  return m;
}

}  // namespace

void save_checkpoint(const ModelParams& params, const std::string& path) {
  std::string out = "#coata-checkpoint v1\n";
  append_matrix(out, "w1", params.w1);
  append_matrix(out, "w2", params.w2);
  append_matrix(out, "w_proj", params.w_proj);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InputError("cannot write checkpoint: " + path);
  f << out;
}

ModelParams load_checkpoint(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw InputError("cannot open checkpoint: " + path);
  std::string line;
  if (!std::getline(f, line) || line != "#coata-checkpoint v1")
    throw InputError(path + ": not a checkpoint file (bad magic line)");
  ModelParams p;
  p.w1 = read_matrix(f, path, "w1");
  p.w2 = read_matrix(f, path, "w2");
  p.w_proj = read_matrix(f, path, "w_proj");
  p.check_finite("load_checkpoint");
  return p;
}

std::string ppr_dump(const ScoreTable& scores) {
  std::string out;
  for (size_t s = 0; s < scores.size(); ++s) {
    for (const ScoreEntry& e : scores[s]) {
      out += std::to_string(s);
      out += '\t';
      out += std::to_string(e.target);
      out += '\t';
      out += format_double(e.score);
      out += '\n';
    }
  }
  return out;
}

}  // namespace coata
