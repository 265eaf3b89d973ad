#include "coata/selfcheck.hpp"

#include "coata/bipartite.hpp"
#include "coata/dataset.hpp"
#include "coata/gnn.hpp"
#include "coata/oracles.hpp"
#include "coata/pipeline.hpp"
#include "coata/plain_gcn.hpp"
#include "coata/ppr.hpp"
#include "coata/reconstruct.hpp"
#include "coata/rng.hpp"
#include "coata/run_config.hpp"
#include "coata/tea.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace coata {
namespace {

std::string strf(const char* fmt, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, fmt);
  std::vsnprintf(buf, sizeof buf, fmt, ap);
  va_end(ap);
  return buf;
}

template <typename Body>
CheckResult run_check(std::string name, Body&& body) {
  CheckResult r;
  r.name = std::move(name);
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(r);
  } catch (const std::exception& e) {
    r.status = CheckResult::Status::fail;
    r.detail = std::string("exception: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

SparseGraph random_graph(Rng& rng, Index n, double p, double w_lo = 1.0, double w_hi = 1.0) {
  std::vector<Edge> edges;
  for (Index u = 0; u < n; ++u)
    for (Index v = u + 1; v < n; ++v)
      if (rng.bernoulli(p)) edges.push_back({u, v, rng.uniform(w_lo, w_hi)});
  if (edges.empty()) edges.push_back({0, n > 1 ? 1 : 0, 1.0});
  return SparseGraph::from_undirected_edges(n, std::move(edges));
}

/// Random node-attribute graph via a sparse nonnegative feature matrix.
/// Column 0 always touches nodes 0 and 1 so the singleton filter cannot
/// empty the attribute side; isolate_last leaves the last node degree-free.
BipartiteGraph random_bipartite(Rng& rng, Index n_v, Index n_u, double p, bool isolate_last) {
  Matrix h = Matrix::Zero(n_v, n_u);
  for (Index v = 0; v < n_v; ++v) {
    if (isolate_last && v == n_v - 1) continue;
    for (Index a = 0; a < n_u; ++a)
      if (rng.bernoulli(p)) h(v, a) = rng.uniform(0.2, 3.0);
  }
  h(0, 0) = 1.0;
  h(1, 0) = 1.5;
  if (isolate_last) h.row(n_v - 1).setZero();
  EnrichedFeatures ef;
  ef.h_matrix = std::move(h);
  return build_bipartite(ef);
}

Matrix random_matrix(Rng& rng, Index rows, Index cols, double scale = 1.0) {
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = scale * rng.normal();
  return m;
}

int oracle_iterations(double alpha) {
  // (1-alpha)^iters <= 1e-13 keeps oracle truncation far below the tolerances.
  const int iters = static_cast<int>(std::ceil(-13.0 * std::log(10.0) / std::log1p(-alpha))) + 1;
  return std::min(iters, 2000);
}

Vector dense_scores(const PprResult& res, Index n_v) {
  Vector v = Vector::Zero(n_v);
  for (const auto& [node, score] : res.pi_hat) v(node) = score;
  return v;
}

LabelSet round_robin_labels(Index n, int c) {
  LabelSet ls;
  ls.num_classes = c;
  ls.labels.resize(static_cast<std::size_t>(n));
  ls.splits.assign(static_cast<std::size_t>(n), Split::test);
  for (Index i = 0; i < n; ++i) {
    ls.labels[static_cast<std::size_t>(i)] = static_cast<int>(i % c);
    if (i < 2 * c)
      ls.splits[static_cast<std::size_t>(i)] = Split::train;
    else if (i < 2 * c + 2)
      ls.splits[static_cast<std::size_t>(i)] = Split::val;
  }
  return ls;
}

Matrix cross_cosines(const Matrix& a, const Matrix& b) {
  const Index c = a.rows();
  Matrix cos(c, c);
  for (Index i = 0; i < c; ++i)
    for (Index j = 0; j < c; ++j) {
      const double na = a.row(i).norm(), nb = b.row(j).norm();
      cos(i, j) = (na == 0.0 || nb == 0.0) ? 0.0 : a.row(i).dot(b.row(j)) / (na * nb);
    }
  return cos;
}

RunConfig ablation_config(std::uint64_t seed) {
  RunConfig cfg;
  cfg.sbm_n = 400;
  cfg.sbm_c = 2;
  // Sparse enough that two GCN layers cannot fully denoise the features on
  // their own, leaving headroom for the reconstructed channels.
  cfg.sbm_p_in = 0.008;
  // 40000 cross pairs vs 39800 within pairs: this ratio puts 20% of the
  // expected edge mass between the classes.
  cfg.sbm_p_out = 0.008 * 0.24875;
  cfg.sbm_feature_dim = 8;
  cfg.sbm_noise = 0.5;
  cfg.r_max = 1e-5;  // ranking-grade scores; the tight default is not needed
  cfg.ensemble_eval = true;
  cfg.seed = seed;
  return cfg;
}

}  // namespace

namespace checks {

CheckResult push_ppr_oracle() {
  return run_check("push-ppr-matches-dense-reference", [](CheckResult& r) {
    Rng rng(101);
    const double alphas[] = {0.1, 0.2, 0.5, 0.8};
    double worst_gap = 0.0, worst_over = -1.0, worst_mass = 0.0;
    const auto t0 = std::chrono::steady_clock::now();
    for (int i = 0; i < 50; ++i) {
      const Index n_v = 5 + static_cast<Index>(rng.below(56));
      const Index n_u = 2 + static_cast<Index>(rng.below(40));
      const double p = rng.uniform(0.05, 0.4);
      const bool isolated = i % 5 == 0;
      const BipartiteGraph g = random_bipartite(rng, n_v, n_u, p, isolated);
      const double alpha = alphas[i % 4];
      PprConfig cfg;
      cfg.alpha = alpha;
      cfg.r_max = 1e-8;
      const Index source = isolated ? n_v - 1 : static_cast<Index>(rng.below(n_v));
      const PprResult res = push_ppr(g, source, cfg);
      const Vector pi = oracles::dense_two_hop_ppr(g, source, alpha, oracle_iterations(alpha));
      const Vector pi_hat = dense_scores(res, n_v);
      worst_gap = std::max(worst_gap, (pi_hat - pi).cwiseAbs().maxCoeff());
      worst_over = std::max(worst_over, (pi_hat - pi).maxCoeff());
      worst_mass = std::max(worst_mass, std::abs(res.pi_sum() + res.residue_sum() - 1.0));
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool ok = worst_gap <= 1e-6 && worst_over <= 1e-12 && worst_mass <= 1e-10 && secs < 10.0;
    r.status = ok ? CheckResult::Status::pass : CheckResult::Status::fail;
    r.detail = strf("50 graphs: max|pi_hat-pi|=%.3g (<=1e-6), max overshoot=%.3g (<=1e-12), "
                    "max|mass-1|=%.3g (<=1e-10), %.2fs (<10s)",
                    worst_gap, worst_over, worst_mass, secs);
  });
}

CheckResult tea_convergence() {
  return run_check("feature-propagation-contracts-to-fixed-point", [](CheckResult& r) {
    Rng rng(202);
    const double betas[] = {0.1, 0.3, 0.5, 0.9};
    double worst_bound_excess = -1.0;  // ||E_l|| minus the geometric bound
    double worst_solve_gap = 0.0;
    for (int i = 0; i < 20; ++i) {
      const Index n = 5 + static_cast<Index>(rng.below(45));
      const Index d = 1 + static_cast<Index>(rng.below(8));
      const SparseGraph g = random_graph(rng, n, rng.uniform(0.1, 0.5), 0.5, 2.0);
      const NormalizedAdjacency adj = normalize(g);
      const Matrix x = random_matrix(rng, n, d);
      const double beta = betas[i % 4];
      const Matrix x_star = oracles::dense_fixed_point(x, adj, beta);
      const double e0 = (x - x_star).norm();
      for (int l = 1; l <= 50; ++l) {
        const Matrix xl = propagate(x, adj, {l, beta}).h_matrix;
        const double err = (xl - x_star).norm();
        worst_bound_excess = std::max(worst_bound_excess, err - std::pow(1.0 - beta, l) * e0);
      }
      const Matrix x500 = propagate(x, adj, {500, beta}).h_matrix;
      worst_solve_gap = std::max(worst_solve_gap, (x500 - x_star).norm());
    }
    const bool ok = worst_bound_excess <= 1e-9 && worst_solve_gap <= 1e-9;
    r.status = ok ? CheckResult::Status::pass : CheckResult::Status::fail;
    r.detail = strf("20 instances: max(||E_l|| - (1-beta)^l ||E_0||)=%.3g (<=1e-9), "
                    "max||X_500 - X*||=%.3g (<=1e-9)",
                    worst_bound_excess, worst_solve_gap);
  });
}

CheckResult lower_bound_fuzz() {
  return run_check("ppr-lower-bound-certificates-hold", [](CheckResult& r) {
    Rng rng(303);
    int violations = 0, done = 0, attempts = 0;
    double worst_ratio = 0.0;  // bound / pi, should stay <= 1
    while (done < 100 && attempts < 5000) {
      ++attempts;
      const Index n_v = 4 + static_cast<Index>(rng.below(12));
      const Index n_u = 2 + static_cast<Index>(rng.below(8));
      const BipartiteGraph g = random_bipartite(rng, n_v, n_u, rng.uniform(0.2, 0.6), false);
      const Index source = static_cast<Index>(rng.below(n_v));
      const Index target = static_cast<Index>(rng.below(n_v));
      const int c = 1 + static_cast<int>(rng.below(2));
      const double alpha = rng.uniform(0.05, 0.95);
      const LowerBoundCertificate cert = lower_bound(g, source, target, c, alpha);
      if (cert.path_count < 1) continue;  // only certificated pairs count
      const Vector pi = oracles::dense_two_hop_ppr(g, source, alpha, oracle_iterations(alpha));
      if (cert.bound > pi(target)) ++violations;
      if (pi(target) > 0.0) worst_ratio = std::max(worst_ratio, cert.bound / pi(target));
      ++done;
    }
    const bool ok = done == 100 && violations == 0;
    r.status = ok ? CheckResult::Status::pass : CheckResult::Status::fail;
    r.detail = strf("%d certificated cases, %d violations, max bound/pi=%.3g", done, violations,
                    worst_ratio);
  });
}

CheckResult gradient_fd() {
  return run_check("analytic-gradients-match-finite-differences", [](CheckResult& r) {
    struct LambdaConfig {
      double l1, l2, l3;
      const char* label;
    };
    const LambdaConfig configs[] = {
        {0.0, 0.0, 0.0, "ce"},     {1.0, 0.0, 0.0, "ce_aug"},      {0.0, 1.0, 0.0, "co"},
        {0.0, 0.0, 1.0, "dpa"},    {1.0, 0.5, 0.1, "combined"},
    };
    Rng rng(404);
    double worst = 0.0;
    std::string worst_at;
    for (int inst = 0; inst < 10; ++inst) {
      const Index n = 8 + static_cast<Index>(rng.below(6));
      const Index in_dim = 4 + static_cast<Index>(rng.below(3));
      const int c = 2 + inst % 3;
      const NormalizedAdjacency orig = normalize(random_graph(rng, n, 0.35));
      std::vector<NormalizedAdjacency> augs;
      augs.push_back(normalize(random_graph(rng, n, 0.3)));
      augs.push_back(normalize(random_graph(rng, n, 0.3)));
      Matrix x(n, in_dim);
      for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < in_dim; ++j) x(i, j) = rng.uniform(-1.0, 1.0);
      const LabelSet labels = round_robin_labels(n, c);
      Rng init(500 + static_cast<std::uint64_t>(inst));
      ModelParams params = ModelParams::init(in_dim, 5, c, 4, init);
      for (const LambdaConfig& lc : configs) {
        GnnConfig cfg;
        cfg.hidden_dim = 5;
        cfg.proj_dim = 4;
        cfg.dropout = 0.0;
        cfg.lambda1 = lc.l1;
        cfg.lambda2 = lc.l2;
        cfg.lambda3 = lc.l3;
        const ForwardCache cache = forward_all(params, orig, augs, x, labels, cfg, 9, 0, true);
        const Gradients g = backward(cache, params, orig, augs, labels, cfg);
        // The consistency target is a constant by construction, so the
        // finite-difference probe must hold it fixed too.
        const Matrix y_frozen = cache.y_agg;
        const auto f = [&]() {
          return forward_all(params, orig, augs, x, labels, cfg, 9, 0, true, &y_frozen)
              .losses.total;
        };
        const std::vector<Matrix> fd =
            oracles::finite_diff_grad(f, {&params.w1, &params.w2, &params.w_proj}, 1e-6);
        const Matrix* analytic[] = {&g.w1, &g.w2, &g.w_proj};
        const char* names[] = {"w1", "w2", "w_proj"};
        for (int m = 0; m < 3; ++m) {
          const Matrix& a = *analytic[m];
          const Matrix& fdm = fd[static_cast<std::size_t>(m)];
          for (Index i = 0; i < a.rows(); ++i)
            for (Index j = 0; j < a.cols(); ++j) {
              const double denom = std::max({std::abs(a(i, j)), std::abs(fdm(i, j)), 1e-4});
              const double rel = std::abs(a(i, j) - fdm(i, j)) / denom;
              if (rel > worst) {
                worst = rel;
                worst_at = strf("%s/%s inst %d", lc.label, names[m], inst);
              }
            }
        }
      }
    }
    r.status = worst <= 1e-4 ? CheckResult::Status::pass : CheckResult::Status::fail;
    r.detail = strf("10 instances x 5 loss configs: max rel err=%.3g (<=1e-4) at %s", worst,
                    worst_at.c_str());
  });
}

CheckResult prototype_alignment() {
  return run_check("prototype-alignment-converges", [](CheckResult& r) {
    const double tau = 0.5, lr = 1.0;
    double worst_cos = 1.0, worst_margin = 2.0;
    int worst_steps = 0;
    bool all_ok = true;
    for (int c : {3, 8}) {
      for (std::uint64_t seed = 0; seed < 5; ++seed) {
        Rng rng = Rng::fork(seed, static_cast<std::uint64_t>(c), 0);
        Prototypes a, b;
        a.p = random_matrix(rng, c, 16);
        b.p = random_matrix(rng, c, 16);
        a.valid.assign(static_cast<std::size_t>(c), 1);
        b.valid.assign(static_cast<std::size_t>(c), 1);
        double min_cos = -1.0, margin = -2.0;
        int steps = 0;
        for (; steps < 2000; ++steps) {
          const Matrix cos = cross_cosines(a.p, b.p);
          min_cos = cos.diagonal().minCoeff();
          double max_off = -1.0;
          for (Index i = 0; i < c; ++i)
            for (Index j = 0; j < c; ++j)
              if (i != j) max_off = std::max(max_off, cos(i, j));
          margin = min_cos - max_off;
          if (min_cos >= 0.99 && margin >= 0.05) break;
          const DpaGradients g = dpa_prototype_gradients(a, b, tau);
          a.p -= lr * g.dp;
          b.p -= lr * g.dp_prime;
        }
        if (!(min_cos >= 0.99 && margin >= 0.05)) all_ok = false;
        worst_cos = std::min(worst_cos, min_cos);
        worst_margin = std::min(worst_margin, margin);
        worst_steps = std::max(worst_steps, steps);
      }
    }
    r.status = all_ok ? CheckResult::Status::pass : CheckResult::Status::fail;
    r.detail = strf("10 runs (c=3,8 x seeds 0-4): min diag cos=%.4f (>=0.99), "
                    "min margin=%.4f (>=0.05), max steps=%d (<2000)",
                    worst_cos, worst_margin, worst_steps);
  });
}

CheckResult homophily_closed_form() {
  return run_check("homophily-schedule-matches-closed-form", [](CheckResult& r) {
    Rng rng(606);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
      const double p0 = rng.uniform();
      const double beta = rng.uniform();
      const int l = static_cast<int>(rng.below(51));
      const double recursion = homophily_schedule(p0, beta, l);
      const double closed = 1.0 - std::pow(1.0 - beta, l) * (1.0 - p0);
      worst = std::max(worst, std::abs(recursion - closed));
    }
    r.status = worst <= 1e-12 ? CheckResult::Status::pass : CheckResult::Status::fail;
    r.detail = strf("1000 triples: max|recursion - closed form|=%.3g (<=1e-12)", worst);
  });
}

CheckResult sbm_ablation() {
  return run_check("sbm-ablation-ordering-holds", [](CheckResult& r) {
    double full_sum = 0.0, nodpa_sum = 0.0, plain_sum = 0.0;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      RunConfig cfg = ablation_config(seed);
      const Dataset data = generate_sbm(cfg.sbm());
      const AugmentationResult aug = run_augmentation(data, cfg);
      full_sum += run_training(data, aug, cfg).test_acc;
      RunConfig no_dpa = cfg;
      no_dpa.lambda3 = 0.0;
      nodpa_sum += run_training(data, aug, no_dpa).test_acc;
      const NormalizedAdjacency adj = normalize(data.graph);
      const TrainResult plain =
          train_plain_gcn(adj, data.features, data.labels, cfg.gnn(), cfg.seed);
      plain_sum += evaluate(plain.params, adj, data.features, data.labels, Split::test);
    }
    const double full = full_sum / 5.0, nodpa = nodpa_sum / 5.0, plain = plain_sum / 5.0;
    const bool ordered = full >= nodpa - 1e-12 && nodpa >= plain - 1e-12;
    const bool beats = full - plain >= 0.01;
    r.status = ordered && beats ? CheckResult::Status::pass : CheckResult::Status::fail;
    r.detail = strf("mean test acc over seeds 0-4: full=%.4f >= no-dpa=%.4f >= plain=%.4f, "
                    "full-plain=%.4f (>=0.01)",
                    full, nodpa, plain, full - plain);
  });
}

CheckResult plain_gcn_equivalence() {
  return run_check("zero-lambda-run-matches-plain-gcn", [](CheckResult& r) {
    RunConfig cfg;
    cfg.sbm_n = 300;
    cfg.sbm_c = 3;
    cfg.sbm_p_in = 0.08;
    cfg.sbm_p_out = 0.02;
    cfg.sbm_feature_dim = 12;
    cfg.sbm_noise = 0.6;
    cfg.seed = 3;
    cfg.epochs = 60;
    cfg.lambda1 = cfg.lambda2 = cfg.lambda3 = 0.0;
    const Dataset data = generate_sbm(cfg.sbm());
    const AugmentationResult aug = run_augmentation(data, cfg);
    const TrainingProducts dual = run_training(data, aug, cfg);
    const NormalizedAdjacency adj = normalize(data.graph);
    const TrainResult plain = train_plain_gcn(adj, data.features, data.labels, cfg.gnn(), cfg.seed);
    if (dual.result.history.size() != plain.history.size()) {
      r.status = CheckResult::Status::fail;
      r.detail = strf("history length mismatch: %zu vs %zu", dual.result.history.size(),
                      plain.history.size());
      return;
    }
    double worst = 0.0;
    for (std::size_t e = 0; e < plain.history.size(); ++e) {
      const EpochMetrics& d = dual.result.history[e];
      const EpochMetrics& p = plain.history[e];
      worst = std::max({worst, std::abs(d.losses.ce - p.losses.ce),
                        std::abs(d.losses.total - p.losses.total),
                        std::abs(d.train_acc - p.train_acc), std::abs(d.val_acc - p.val_acc)});
    }
    const double param_gap =
        std::max({(dual.result.params.w1 - plain.params.w1).cwiseAbs().maxCoeff(),
                  (dual.result.params.w2 - plain.params.w2).cwiseAbs().maxCoeff(),
                  (dual.result.params.w_proj - plain.params.w_proj).cwiseAbs().maxCoeff()});
    const bool ok = worst <= 1e-10 && param_gap <= 1e-10 &&
                    dual.result.best_epoch == plain.best_epoch;
    r.status = ok ? CheckResult::Status::pass : CheckResult::Status::fail;
    r.detail = strf("60 epochs with dropout on: max metric gap=%.3g (<=1e-10), best-epoch "
                    "param gap=%.3g (<=1e-10), best epoch %d vs %d",
                    worst, param_gap, dual.result.best_epoch, plain.best_epoch);
  });
}

CheckResult cora_band() {
  return run_check("cora-accuracy-band", [](CheckResult& r) {
    std::vector<std::string> candidates;
    if (const char* env = std::getenv("COATA_DATA_DIR")) {
      candidates.push_back(std::string(env) + "/cora");
      candidates.push_back(env);
    }
    candidates.push_back("data/cora");
    candidates.push_back("../data/cora");
    std::string dir;
    for (const std::string& cand : candidates)
      if (std::filesystem::exists(std::filesystem::path(cand) / "edges.tsv")) {
        dir = cand;
        break;
      }
    if (dir.empty()) {
      r.status = CheckResult::Status::skip;
      r.detail = "no converted cora files found (set COATA_DATA_DIR to enable)";
      return;
    }
    const Dataset data = load_dataset(dir);
    RunConfig cfg;
    cfg.data_dir = dir;
    double sum = 0.0;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      cfg.seed = seed;
      const AugmentationResult aug = run_augmentation(data, cfg);
      sum += run_training(data, aug, cfg).test_acc;
    }
    const double mean = sum / 5.0;
    r.status = mean >= 0.80 ? CheckResult::Status::pass : CheckResult::Status::fail;
    r.detail = strf("cora at %s: mean test acc over 5 seeds=%.4f (>=0.80)", dir.c_str(), mean);
  });
}

CheckResult reconstruction_invariants() {
  return run_check("reconstruction-invariants", [](CheckResult& r) {
    Rng rng(707);
    std::string problem;
    for (int inst = 0; inst < 30 && problem.empty(); ++inst) {
      const Index n = 8 + static_cast<Index>(rng.below(30));
      const SparseGraph g = random_graph(rng, n, rng.uniform(0.1, 0.4), 0.5, 2.0);
      ScoreTable scores(static_cast<std::size_t>(n));
      for (Index v = 0; v < n; ++v) {
        std::vector<ScoreEntry> row;
        for (Index t = 0; t < n; ++t)
          if (t != v && rng.bernoulli(0.7)) row.push_back({t, rng.uniform()});
        std::sort(row.begin(), row.end(), [](const ScoreEntry& x, const ScoreEntry& y) {
          return x.score != y.score ? x.score > y.score : x.target < y.target;
        });
        scores[static_cast<std::size_t>(v)] = std::move(row);
      }
      ReconstructionConfig knn_cfg;
      knn_cfg.strategy = ReconstructionStrategy::knn;
      knn_cfg.k = 3;
      const SparseGraph knn = reconstruct(g, scores, knn_cfg);
      for (const Edge& e : knn.directed_edges()) {
        if (e.w != 1.0) problem = strf("knn edge weight %g != 1", e.w);
        bool nominated = false;
        for (int side = 0; side < 2; ++side) {
          const Index from = side == 0 ? e.u : e.v, to = side == 0 ? e.v : e.u;
          const auto& row = scores[static_cast<std::size_t>(from)];
          const std::size_t limit = std::min<std::size_t>(row.size(), 3);
          for (std::size_t i = 0; i < limit; ++i)
            if (row[i].target == to) nominated = true;
        }
        if (!nominated) problem = strf("knn edge %lld-%lld nominated by neither endpoint",
                                       static_cast<long long>(e.u), static_cast<long long>(e.v));
      }
      ReconstructionConfig em_cfg;
      em_cfg.strategy = ReconstructionStrategy::edge_mod;
      em_cfg.k_add = 2;
      em_cfg.k_del = 2;
      const SparseGraph em = reconstruct(g, scores, em_cfg);
      std::vector<Index> deleted(static_cast<std::size_t>(n), 0);
      for (const Edge& e : g.directed_edges())
        if (!em.has_edge(e.u, e.v)) ++deleted[static_cast<std::size_t>(e.u)];
      for (Index v = 0; v < n; ++v)
        if (deleted[static_cast<std::size_t>(v)] > em_cfg.k_del)
          problem = strf("node %lld lost %lld > k_del edges", static_cast<long long>(v),
                         static_cast<long long>(deleted[static_cast<std::size_t>(v)]));
      for (const Edge& e : em.directed_edges()) {
        if (g.has_edge(e.u, e.v)) {
          auto [begin, end] = g.neighbors(e.u);
          for (const Edge* it = begin; it != end; ++it)
            if (it->v == e.v && it->w != e.w)
              problem = strf("edge %lld-%lld weight changed %g -> %g",
                             static_cast<long long>(e.u), static_cast<long long>(e.v), it->w, e.w);
        } else if (e.w != 1.0) {
          problem = strf("added edge weight %g != 1", e.w);
        }
      }
    }
    r.status = problem.empty() ? CheckResult::Status::pass : CheckResult::Status::fail;
    r.detail = problem.empty() ? "30 fuzz instances: nomination, weight and deletion-cap "
                                 "invariants hold for both strategies"
                               : problem;
  });
}

CheckResult normalization_bounds() {
  return run_check("normalization-bounds", [](CheckResult& r) {
    Rng rng(808);
    double worst_asym = 0.0, worst_norm = 0.0, worst_dense_gap = 0.0;
    for (int inst = 0; inst < 30; ++inst) {
      const Index n = 5 + static_cast<Index>(rng.below(40));
      const SparseGraph g = random_graph(rng, n, rng.uniform(0.1, 0.5), 0.5, 3.0);
      const NormalizedAdjacency adj = normalize(g);
      const Matrix dense = Matrix(adj.matrix);
      worst_asym = std::max(worst_asym, (dense - dense.transpose()).cwiseAbs().maxCoeff());
      worst_norm = std::max(worst_norm, estimate_spectral_norm(adj, 200, 99 + inst));
      std::vector<Edge> undirected;
      for (const Edge& e : g.directed_edges())
        if (e.u < e.v) undirected.push_back(e);
      const Matrix ref = oracles::dense_normalize(n, undirected);
      worst_dense_gap = std::max(worst_dense_gap, (dense - ref).cwiseAbs().maxCoeff());
    }
    const bool ok = worst_asym <= 1e-12 && worst_norm <= 1.0 + 1e-9 && worst_dense_gap <= 1e-12;
    r.status = ok ? CheckResult::Status::pass : CheckResult::Status::fail;
    r.detail = strf("30 graphs: asymmetry=%.3g, spectral norm<=%.12f, dense-reference gap=%.3g",
                    worst_asym, worst_norm, worst_dense_gap);
  });
}

}  // namespace checks

std::vector<CheckResult> run_acceptance_suite() {
  std::vector<CheckResult> out;
  out.push_back(checks::push_ppr_oracle());
  out.push_back(checks::tea_convergence());
  out.push_back(checks::lower_bound_fuzz());
  out.push_back(checks::gradient_fd());
  out.push_back(checks::prototype_alignment());
  out.push_back(checks::homophily_closed_form());
  out.push_back(checks::sbm_ablation());
  out.push_back(checks::plain_gcn_equivalence());
  out.push_back(checks::cora_band());
  return out;
}

std::vector<CheckResult> run_selftest_suite() {
  std::vector<CheckResult> out = run_acceptance_suite();
  out.push_back(checks::reconstruction_invariants());
  out.push_back(checks::normalization_bounds());
  return out;
}

bool print_check_report(const std::vector<CheckResult>& results) {
  bool all_ok = true;
  for (const CheckResult& r : results) {
    const char* tag = r.status == CheckResult::Status::pass   ? "PASS"
                      : r.status == CheckResult::Status::skip ? "SKIP"
                                                              : "FAIL";
    std::printf("%s %-45s %6.2fs  %s\n", tag, r.name.c_str(), r.seconds, r.detail.c_str());
    if (r.status == CheckResult::Status::fail) all_ok = false;
  }
  return all_ok;
}

}  // namespace coata
