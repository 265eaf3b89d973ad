#pragma once

#include "coata/bipartite.hpp"
#include "coata/dataset.hpp"
#include "coata/gnn.hpp"
#include "coata/ppr.hpp"
#include "coata/reconstruct.hpp"
#include "coata/tea.hpp"

#include <cstdint>
#include <string>

namespace coata {

/// Every tunable in one flat bag, loadable from a flat-key JSON file and
/// serialized verbatim into each run's output directory.
struct RunConfig {
  // attribute propagation
  int h = 2;
  double beta = 0.3;
  // bipartite PPR
  double alpha = 0.2;
  double r_max = 1e-6;
  Index top_t = 256;
  std::string singleton_policy = "drop";  // or "downweight"
  // reconstruction
  Index knn_k = 0;  // 0 resolves to round(2m/n)
  Index k_add = 5;
  Index k_del = 5;
  // model and losses
  Index hidden_dim = 64;
  Index proj_dim = 32;
  double dropout = 0.5;
  double lr = 0.01;
  double momentum = 0.9;
  double weight_decay = 5e-4;
  int epochs = 200;
  double lambda1 = 1.0;
  double lambda2 = 0.5;
  double lambda3 = 0.1;
  double tau = 0.5;
  bool ce_sum = false;
  double t_min = 0.0;
  bool sharpen = false;
  double sharpen_temp = 0.5;
  bool ensemble_eval = false;
  // run control
  std::uint64_t seed = 0;
  bool deterministic = false;
  int workers = 1;
  std::string data_dir;  // empty -> generated SBM
  std::string out_dir;
  // SBM knobs used when data_dir is empty
  Index sbm_n = 400;
  int sbm_c = 2;
  double sbm_p_in = 0.05;
  double sbm_p_out = 0.01;
  Index sbm_feature_dim = 16;
  double sbm_noise = 0.5;

  void validate() const;

  TeaConfig tea() const { return {h, beta}; }
  PprConfig ppr() const { return {alpha, r_max}; }
  BipartiteBuildOptions bipartite() const;
  ReconstructionConfig knn_reconstruction() const;
  ReconstructionConfig edge_mod_reconstruction() const;
  GnnConfig gnn() const;
  SbmSpec sbm() const;
};

/// Parses a flat-key JSON object; unknown keys are errors so typos cannot
/// silently fall back to defaults. Values land on top of `base`.
RunConfig run_config_from_json(const std::string& json_text, const RunConfig& base = {});
RunConfig load_run_config(const std::string& path, const RunConfig& base = {});

/// Stable key order, two-space indent, round-trips through the parser.
std::string run_config_to_json(const RunConfig& cfg);
void save_run_config(const RunConfig& cfg, const std::string& path);

}  // namespace coata
