#pragma once

#include "coata/dataset.hpp"
#include "coata/gnn.hpp"
#include "coata/ppr.hpp"
#include "coata/reconstruct.hpp"
#include "coata/run_config.hpp"

#include <string>
#include <vector>

namespace coata {

/// Preprocessing products: enriched attributes, PPR score lists, and the two
/// reconstructed graphs, plus the counters the CLI reports.
struct AugmentationResult {
  ScoreTable scores;
  SparseGraph knn;
  SparseGraph edge_mod;
  ReconstructionReport knn_report;
  ReconstructionReport edge_mod_report;
  long clamped_negatives = 0;
  Index attributes_kept = 0;
  long total_pushes = 0;
};

/// Attribute propagation, bipartite projection, per-source push PPR, and
/// both reconstructions.
AugmentationResult run_augmentation(const Dataset& data, const RunConfig& cfg);

struct TrainingProducts {
  TrainResult result;
  double test_acc = 0.0;
  std::vector<NormalizedAdjacency> adjacencies;  // original first, then knn, edge_mod
};

/// Trains the dual-channel model on the precomputed augmentations and
/// evaluates the best-epoch parameters on the test split (original channel,
/// or the channel mean when cfg.ensemble_eval).
TrainingProducts run_training(const Dataset& data, const AugmentationResult& aug,
                              const RunConfig& cfg);

/// Loads cfg.data_dir, or generates the configured SBM when it is empty.
/// Loader warnings are appended to *warnings when given.
Dataset load_or_generate(const RunConfig& cfg, std::vector<std::string>* warnings = nullptr);

/// epoch,ce,ce_aug,co,dpa,total,train_acc,val_acc with a header row.
std::string metrics_csv(const std::vector<EpochMetrics>& history);

/// One "id<TAB>v0<TAB>...<TAB>v{d-1}" line per node.
std::string embeddings_tsv(const Matrix& z);

/// "source<TAB>target<TAB>score" sorted by (source, -score).
std::string ppr_dump(const ScoreTable& scores);

/// Plain-text checkpoint: the three weight matrices with dimension headers,
/// shortest round-trip floats. load(save(p)) reproduces p bit-for-bit.
void save_checkpoint(const ModelParams& params, const std::string& path);
ModelParams load_checkpoint(const std::string& path);

}  // namespace coata
