#include "coata/ppr.hpp"

#include "coata/oracles.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <thread>

namespace coata {

double PprResult::pi_sum() const {
  double s = 0.0;
  for (const auto& [node, val] : pi_hat) s += val;
  return s;
}

double PprResult::residue_sum() const {
  double s = 0.0;
  for (const auto& [node, val] : residue) s += val;
  return s;
}

PprWorkspace::PprWorkspace(Index n_v, Index n_u)
    : pi_(static_cast<size_t>(n_v), 0.0),
      res_(static_cast<size_t>(n_v), 0.0),
      attr_res_(static_cast<size_t>(n_u), 0.0),
      queued_(static_cast<size_t>(n_v), 0),
      is_touched_(static_cast<size_t>(n_v), 0) {}

PprResult push_ppr(const BipartiteGraph& g, Index source, const PprConfig& cfg,
                   PprWorkspace& ws) {
  cfg.validate();
  if (source < 0 || source >= g.num_nodes())
    throw InputError("push_ppr: source " + std::to_string(source) + " out of range [0, " +
                     std::to_string(g.num_nodes()) + ")");

  PprResult out;
  out.source = source;

  // Absorbing convention for a source whose feature row vanished entirely.
  if (g.node_degree(source) <= 0.0) {
    out.pi_hat.emplace_back(source, 1.0);
    return out;
  }

  auto& pi = ws.pi_;
  auto& res = ws.res_;
  auto& queued = ws.queued_;
  auto& touched_flag = ws.is_touched_;
  auto& queue = ws.queue_;
  auto& touched = ws.touched_;
  queue.clear();

  auto touch = [&](Index v) {
    if (!touched_flag[v]) {
      touched_flag[v] = 1;
      touched.push_back(v);
    }
  };

  res[source] = 1.0;
  touch(source);
  queue.push_back(source);
  queued[source] = 1;
  size_t head = 0;

  // Push accounting: each push moves at least alpha * r_max * d(v) of mass
  // into pi, so the loop is finite; the budget only guards against bugs.
  double min_degree = std::numeric_limits<double>::infinity();
  for (Index v = 0; v < g.num_nodes(); ++v)
    if (g.node_degree(v) > 0.0) min_degree = std::min(min_degree, g.node_degree(v));
  const double budget_f = 2.0 / (cfg.alpha * cfg.r_max * min_degree) + 1e6;
  const long budget = budget_f > 9e17 ? std::numeric_limits<long>::max()
                                      : static_cast<long>(budget_f);

  while (head < queue.size()) {
    const Index v = queue[head++];
    queued[v] = 0;
    const double dv = g.node_degree(v);
    const double rv = res[v];
    if (!(rv / dv > cfg.r_max)) continue;
    if (++out.pushes > budget)
      throw InternalError("push_ppr: push budget exceeded, kernel failed to converge");

    res[v] = 0.0;
    pi[v] += cfg.alpha * rv;
    const double spread = (1.0 - cfg.alpha) * rv / dv;

    // V -> U: residue lands on the attribute side ...
    for (const auto& arc : g.node_arcs(v)) ws.attr_res_[arc.to] += spread * arc.w;

    // ... and is drained straight back to V, no extra decay.
    for (const auto& arc : g.node_arcs(v)) {
      const Index a = arc.to;
      const double ra = ws.attr_res_[a];
      if (ra == 0.0) continue;
      ws.attr_res_[a] = 0.0;
      const double per_weight = ra / g.attr_degree(a);
      for (const auto& back : g.attr_arcs(a)) {
        const Index t = back.to;
        res[t] += per_weight * back.w;
        touch(t);
        if (!queued[t] && res[t] / g.node_degree(t) > cfg.r_max) {
          queued[t] = 1;
          queue.push_back(t);
        }
      }
    }
  }

  std::sort(touched.begin(), touched.end());
  for (Index v : touched) {
    if (pi[v] != 0.0) out.pi_hat.emplace_back(v, pi[v]);
    if (res[v] != 0.0) out.residue.emplace_back(v, res[v]);
    pi[v] = 0.0;
    res[v] = 0.0;
    touched_flag[v] = 0;
  }
  touched.clear();
  return out;
}

PprResult push_ppr(const BipartiteGraph& g, Index source, const PprConfig& cfg) {
  PprWorkspace ws(g.num_nodes(), g.num_attributes());
  return push_ppr(g, source, cfg, ws);
}

double LowerBoundCertificate::recompute(double alpha) const {
  if (path_count == 0) return 0.0;
  return alpha * std::pow(1.0 - alpha, 2.0 * c) * static_cast<double>(path_count) *
         std::pow(w_min * w_min / (d_max_v * d_max_u), c);
}

LowerBoundCertificate lower_bound(const BipartiteGraph& g, Index source, Index target, int c,
                                  double alpha, long max_paths) {
  if (c < 1) throw InputError("lower_bound: c must be >= 1");
  if (source < 0 || source >= g.num_nodes() || target < 0 || target >= g.num_nodes())
    throw InputError("lower_bound: source/target out of range");

  LowerBoundCertificate cert;
  cert.source = source;
  cert.target = target;
  cert.c = c;
  cert.d_max_v = g.num_nodes() > 0 ? g.node_degrees().maxCoeff() : 0.0;
  cert.d_max_u = g.num_attributes() > 0 ? g.attr_degrees().maxCoeff() : 0.0;
  cert.w_min = std::numeric_limits<double>::infinity();
  for (Index v = 0; v < g.num_nodes(); ++v)
    for (const auto& arc : g.node_arcs(v)) cert.w_min = std::min(cert.w_min, arc.w);
  if (!std::isfinite(cert.w_min)) cert.w_min = 0.0;

  OracleBudget budget;
  budget.max_paths = max_paths;
  cert.path_count = oracles::enumerate_paths(g, source, target, c, budget);
  cert.bound = cert.recompute(alpha);
  return cert;
}

ScoreTable compute_score_table(const BipartiteGraph& g, const PprConfig& cfg, Index top_t,
                               int workers, long* total_pushes) {
  cfg.validate();
  if (top_t < 1) throw InputError("compute_score_table: top_t must be >= 1");
  const Index n = g.num_nodes();
  ScoreTable table(static_cast<size_t>(n));
  std::atomic<long> pushes{0};

  auto run_shard = [&](Index begin, Index end) {
    PprWorkspace ws(g.num_nodes(), g.num_attributes());
    long local_pushes = 0;
    for (Index s = begin; s < end; ++s) {
      PprResult r = push_ppr(g, s, cfg, ws);
      local_pushes += r.pushes;
      auto& entries = table[static_cast<size_t>(s)];
      entries.reserve(r.pi_hat.size());
      for (const auto& [node, score] : r.pi_hat)
        if (node != s) entries.push_back({node, score});
      std::sort(entries.begin(), entries.end(), [](const ScoreEntry& a, const ScoreEntry& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.target < b.target;
      });
      if (static_cast<Index>(entries.size()) > top_t) entries.resize(static_cast<size_t>(top_t));
      entries.shrink_to_fit();
    }
    pushes += local_pushes;
  };

  workers = std::max(1, workers);
  if (workers == 1 || n < 2 * workers) {
    run_shard(0, n);
  } else {
    std::vector<std::thread> threads;
    const Index chunk = (n + workers - 1) / workers;
    for (int t = 0; t < workers; ++t) {
      const Index begin = t * chunk;
      const Index end = std::min(n, begin + chunk);
      if (begin >= end) break;
      threads.emplace_back(run_shard, begin, end);
    }
    for (auto& th : threads) th.join();
  }

  if (total_pushes) *total_pushes = pushes.load();
  return table;
}

}  // namespace coata
