#include "coata/run_config.hpp"

#include "json.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <vector>

namespace coata {

using ordered_json = nlohmann::ordered_json;

void RunConfig::validate() const {
  tea().validate();
  ppr().validate();
  if (top_t < 1) throw InputError("config: top_t must be >= 1");
  if (singleton_policy != "drop" && singleton_policy != "downweight")
    throw InputError("config: singleton_policy must be drop or downweight");
  knn_reconstruction().validate();
  edge_mod_reconstruction().validate();
  gnn().validate();
  if (workers < 1) throw InputError("config: workers must be >= 1");
  if (data_dir.empty()) sbm().validate();
}

BipartiteBuildOptions RunConfig::bipartite() const {
  BipartiteBuildOptions opts;
  opts.singleton_policy =
      singleton_policy == "drop" ? SingletonPolicy::drop : SingletonPolicy::downweight;
  return opts;
}

ReconstructionConfig RunConfig::knn_reconstruction() const {
  ReconstructionConfig cfg;
  cfg.strategy = ReconstructionStrategy::knn;
  cfg.k = knn_k;
  return cfg;
}

ReconstructionConfig RunConfig::edge_mod_reconstruction() const {
  ReconstructionConfig cfg;
  cfg.strategy = ReconstructionStrategy::edge_mod;
  cfg.k_add = k_add;
  cfg.k_del = k_del;
  return cfg;
}

GnnConfig RunConfig::gnn() const {
  GnnConfig cfg;
  cfg.hidden_dim = hidden_dim;
  cfg.proj_dim = proj_dim;
  cfg.dropout = dropout;
  cfg.lr = lr;
  cfg.momentum = momentum;
  cfg.weight_decay = weight_decay;
  cfg.epochs = epochs;
  cfg.lambda1 = lambda1;
  cfg.lambda2 = lambda2;
  cfg.lambda3 = lambda3;
  cfg.tau = tau;
  cfg.ce_sum = ce_sum;
  cfg.t_min = t_min;
  cfg.sharpen = sharpen;
  cfg.sharpen_temp = sharpen_temp;
  cfg.deterministic = deterministic;
  return cfg;
}

SbmSpec RunConfig::sbm() const {
  SbmSpec spec;
  spec.n = sbm_n;
  spec.c = sbm_c;
  spec.p_in = sbm_p_in;
  spec.p_out = sbm_p_out;
  spec.feature_dim = sbm_feature_dim;
  spec.feature_noise = sbm_noise;
  spec.seed = seed;
  return spec;
}

namespace {

template <typename T>
void read_key(const ordered_json& j, const char* key, T& field) {
  auto it = j.find(key);
  if (it == j.end()) return;
  try {
    field = it->get<T>();
  } catch (const nlohmann::json::exception&) {
    throw InputError(std::string("config key \"") + key + "\" has the wrong type");
  }
}

/// Field list shared by the reader and the writer so they cannot drift.
template <typename Fn>
void for_each_key(RunConfig& cfg, Fn&& fn) {
  fn("h", cfg.h);
  fn("beta", cfg.beta);
  fn("alpha", cfg.alpha);
  fn("r_max", cfg.r_max);
  fn("top_t", cfg.top_t);
  fn("singleton_policy", cfg.singleton_policy);
  fn("knn_k", cfg.knn_k);
  fn("k_add", cfg.k_add);
  fn("k_del", cfg.k_del);
  fn("hidden_dim", cfg.hidden_dim);
  fn("proj_dim", cfg.proj_dim);
  fn("dropout", cfg.dropout);
  fn("lr", cfg.lr);
  fn("momentum", cfg.momentum);
  fn("weight_decay", cfg.weight_decay);
  fn("epochs", cfg.epochs);
  fn("lambda1", cfg.lambda1);
  fn("lambda2", cfg.lambda2);
  fn("lambda3", cfg.lambda3);
  fn("tau", cfg.tau);
  fn("ce_sum", cfg.ce_sum);
  fn("t_min", cfg.t_min);
  fn("sharpen", cfg.sharpen);
  fn("sharpen_temp", cfg.sharpen_temp);
  fn("ensemble_eval", cfg.ensemble_eval);
  fn("seed", cfg.seed);
  fn("deterministic", cfg.deterministic);
  fn("workers", cfg.workers);
  fn("data_dir", cfg.data_dir);
  fn("out_dir", cfg.out_dir);
  fn("sbm_n", cfg.sbm_n);
  fn("sbm_c", cfg.sbm_c);
  fn("sbm_p_in", cfg.sbm_p_in);
  fn("sbm_p_out", cfg.sbm_p_out);
  fn("sbm_feature_dim", cfg.sbm_feature_dim);
  fn("sbm_noise", cfg.sbm_noise);
}

}  // namespace

RunConfig run_config_from_json(const std::string& json_text, const RunConfig& base) {
  ordered_json j;
  try {
    j = ordered_json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw InputError("config must be a JSON object");

  RunConfig cfg = base;
  std::vector<std::string> known;
  for_each_key(cfg, [&](const char* key, auto& field) {
    known.emplace_back(key);
    read_key(j, key, field);
  });
  for (const auto& [key, value] : j.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw InputError("unknown config key \"" + key + "\"");
  }
  return cfg;
}

RunConfig load_run_config(const std::string& path, const RunConfig& base) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return run_config_from_json(ss.str(), base);
}

std::string run_config_to_json(const RunConfig& cfg) {
  ordered_json j = ordered_json::object();
  for_each_key(const_cast<RunConfig&>(cfg),
               [&](const char* key, auto& field) { j[key] = field; });
  return j.dump(2) + "\n";
}

void save_run_config(const RunConfig& cfg, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write config snapshot: " + path);
  out << run_config_to_json(cfg);
}

}  // namespace coata
