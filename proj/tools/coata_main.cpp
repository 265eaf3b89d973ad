#include "CLI11.hpp"

#include "coata/dataset.hpp"
#include "coata/gnn.hpp"
#include "coata/pipeline.hpp"
#include "coata/run_config.hpp"
#include "coata/selfcheck.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace coata;

namespace {

struct CommonFlags {
  std::string config_path;
  std::string data_dir;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool deterministic = false;
  int workers = 1;
};

void register_common(CLI::App* sub, CommonFlags* f) {
  sub->add_option("--config", f->config_path, "JSON config file with flat keys");
  sub->add_option("--data", f->data_dir, "dataset directory (unset: generated SBM)");
  sub->add_option("--out", f->out_dir, "output directory for artifacts");
  sub->add_option("--seed", f->seed, "RNG seed");
  sub->add_flag("--deterministic", f->deterministic,
                "disable dropout so reruns are bit-identical");
  sub->add_option("--workers", f->workers, "threads for the per-source PPR sweep");
}

/// defaults -> config file -> explicitly passed flags.
RunConfig resolve_config(const CLI::App* sub, const CommonFlags& f) {
  RunConfig cfg;
  if (!f.config_path.empty()) cfg = load_run_config(f.config_path, cfg);
  if (sub->count("--data")) cfg.data_dir = f.data_dir;
  if (sub->count("--out")) cfg.out_dir = f.out_dir;
  if (sub->count("--seed")) cfg.seed = f.seed;
  if (sub->count("--deterministic")) cfg.deterministic = f.deterministic;
  if (sub->count("--workers")) cfg.workers = f.workers;
  cfg.validate();
  return cfg;
}

void write_text(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InputError("cannot write " + path);
  f << content;
}

std::string require_out_dir(const RunConfig& cfg, const char* cmd) {
  if (cfg.out_dir.empty())
    throw InputError(std::string(cmd) + ": --out (or out_dir in the config) is required");
  fs::create_directories(cfg.out_dir);
  return cfg.out_dir;
}

Dataset load_input(const RunConfig& cfg) {
  std::vector<std::string> warnings;
  Dataset data = load_or_generate(cfg, &warnings);
  for (const std::string& w : warnings) std::cerr << "warning: " << w << "\n";
  return data;
}

std::vector<double> parse_grid(const std::string& s, const char* what) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw InputError(std::string("sweep: cannot parse ") + what + " value '" + tok + "'");
    }
  }
  if (out.empty()) throw InputError(std::string("sweep: empty ") + what + " grid");
  return out;
}

int cmd_augment(const RunConfig& cfg, bool dump_ppr) {
  const Dataset data = load_input(cfg);
  const AugmentationResult aug = run_augmentation(data, cfg);
  const std::string out = require_out_dir(cfg, "augment");
  save_run_config(cfg, out + "/config.json");
  save_edge_list(aug.knn, out + "/augmented_edges.knn.tsv");
  save_edge_list(aug.edge_mod, out + "/augmented_edges.edgemod.tsv");
  if (dump_ppr) write_text(out + "/ppr_scores.tsv", ppr_dump(aug.scores));

  const long long m0 = data.graph.num_edges();
  std::printf("dataset %s: %lld nodes, %lld edges, %lld attributes kept, %ld negatives clamped\n",
              data.name.c_str(), static_cast<long long>(data.num_nodes()), m0,
              static_cast<long long>(aug.attributes_kept), aug.clamped_negatives);
  std::printf("ppr: %ld pushes across %lld sources\n", aug.total_pushes,
              static_cast<long long>(data.num_nodes()));
  std::printf("knn: k=%lld, %lld edges (original %lld)\n",
              static_cast<long long>(aug.knn_report.k_used),
              static_cast<long long>(aug.knn.num_edges()), m0);
  std::printf("edge_mod: +%lld -%lld edges -> %lld\n",
              static_cast<long long>(aug.edge_mod_report.edges_added),
              static_cast<long long>(aug.edge_mod_report.edges_removed),
              static_cast<long long>(aug.edge_mod.num_edges()));
  return 0;
}

int cmd_train(const RunConfig& cfg) {
  const Dataset data = load_input(cfg);
  const AugmentationResult aug = run_augmentation(data, cfg);
  const TrainingProducts products = run_training(data, aug, cfg);
  const std::string out = require_out_dir(cfg, "train");
  save_run_config(cfg, out + "/config.json");
  write_text(out + "/metrics.csv", metrics_csv(products.result.history));
  save_checkpoint(products.result.params, out + "/checkpoint.tsv");
  const ChannelOutput eval_pass =
      gcn_forward(products.adjacencies.front(), data.features, products.result.params, 0.0, nullptr);
  write_text(out + "/embeddings.tsv", embeddings_tsv(eval_pass.z));

  if (products.result.diverged) {
    std::fprintf(stderr, "training diverged after %zu epochs; artifacts written to %s\n",
                 products.result.history.size(), out.c_str());
    return 1;
  }
  std::printf("train: %zu epochs, best epoch %d, val acc %.4f, test acc %.4f\n",
              products.result.history.size(), products.result.best_epoch,
              products.result.best_val_acc, products.test_acc);
  return 0;
}

int cmd_eval(const RunConfig& cfg, const std::string& checkpoint_path) {
  const Dataset data = load_input(cfg);
  const ModelParams params = load_checkpoint(checkpoint_path);
  if (params.w1.rows() != data.feature_dim())
    throw InputError("eval: checkpoint expects " + std::to_string(params.w1.rows()) +
                     " input features, dataset has " + std::to_string(data.feature_dim()));
  if (params.w2.cols() != data.labels.num_classes)
    throw InputError("eval: checkpoint has " + std::to_string(params.w2.cols()) +
                     " classes, dataset has " + std::to_string(data.labels.num_classes));
  const NormalizedAdjacency adj = normalize(data.graph);
  const Matrix probs = predict_probs(params, adj, data.features);
  const auto report = [&](const char* name, Split s) {
    if (data.labels.nodes_in(s).empty())
      std::printf("%s_acc=n/a\n", name);
    else
      std::printf("%s_acc=%.6f\n", name, accuracy(probs, data.labels, s));
  };
  report("train", Split::train);
  report("val", Split::val);
  report("test", Split::test);
  return 0;
}

int cmd_sweep(const RunConfig& cfg, const std::string& alphas_s, const std::string& betas_s,
              const std::string& hs_s) {
  const std::vector<double> alphas =
      alphas_s.empty() ? std::vector<double>{cfg.alpha} : parse_grid(alphas_s, "alpha");
  const std::vector<double> betas =
      betas_s.empty() ? std::vector<double>{cfg.beta} : parse_grid(betas_s, "beta");
  std::vector<int> hs;
  if (hs_s.empty()) {
    hs.push_back(cfg.h);
  } else {
    for (double v : parse_grid(hs_s, "h")) {
      if (v != static_cast<int>(v) || v < 0) throw InputError("sweep: h grid must be integers >= 0");
      hs.push_back(static_cast<int>(v));
    }
  }
  const Dataset data = load_input(cfg);
  std::string csv = "alpha,beta,h,seed,best_epoch,val_acc,test_acc\n";
  for (double a : alphas)
    for (double b : betas)
      for (int h : hs) {
        RunConfig point = cfg;
        point.alpha = a;
        point.beta = b;
        point.h = h;
        point.validate();
        const AugmentationResult aug = run_augmentation(data, point);
        const TrainingProducts products = run_training(data, aug, point);
        csv += format_double(a) + "," + format_double(b) + "," + std::to_string(h) + "," +
               std::to_string(point.seed) + "," + std::to_string(products.result.best_epoch) +
               "," + format_double(products.result.best_val_acc) + "," +
               format_double(products.test_acc) + "\n";
      }
  std::fputs(csv.c_str(), stdout);
  if (!cfg.out_dir.empty()) {
    fs::create_directories(cfg.out_dir);
    save_run_config(cfg, cfg.out_dir + "/config.json");
    write_text(cfg.out_dir + "/sweep.csv", csv);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"co-augmentation pipeline: attribute-enriched topology, PPR rewiring, "
               "dual-channel GCN training"};
  app.require_subcommand(1);

  CommonFlags f_augment, f_train, f_eval, f_sweep;
  bool dump_ppr = false;
  std::string checkpoint_path, alphas_s, betas_s, hs_s;

  CLI::App* augment = app.add_subcommand("augment", "write reconstructed edge lists");
  register_common(augment, &f_augment);
  augment->add_flag("--dump-ppr", dump_ppr, "also write the raw per-source PPR scores");

  CLI::App* train = app.add_subcommand("train", "train the dual-channel model");
  register_common(train, &f_train);

  CLI::App* eval = app.add_subcommand("eval", "evaluate a checkpoint on a dataset");
  register_common(eval, &f_eval);
  eval->add_option("--checkpoint", checkpoint_path, "checkpoint.tsv written by train")
      ->required();

  CLI::App* sweep = app.add_subcommand("sweep", "grid search over alpha, beta and h");
  register_common(sweep, &f_sweep);
  sweep->add_option("--alphas", alphas_s, "comma-separated alpha values");
  sweep->add_option("--betas", betas_s, "comma-separated beta values");
  sweep->add_option("--hs", hs_s, "comma-separated propagation depths");

  CLI::App* gradcheck =
      app.add_subcommand("gradcheck", "analytic gradients vs finite differences");
  CLI::App* selftest =
      app.add_subcommand("selftest", "run the oracle-backed property suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (augment->parsed()) return cmd_augment(resolve_config(augment, f_augment), dump_ppr);
    if (train->parsed()) return cmd_train(resolve_config(train, f_train));
    if (eval->parsed()) return cmd_eval(resolve_config(eval, f_eval), checkpoint_path);
    if (sweep->parsed()) return cmd_sweep(resolve_config(sweep, f_sweep), alphas_s, betas_s, hs_s);
    if (gradcheck->parsed()) return print_check_report({checks::gradient_fd()}) ? 0 : 1;
    if (selftest->parsed()) return print_check_report(run_selftest_suite()) ? 0 : 1;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
