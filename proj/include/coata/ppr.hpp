#pragma once

#include "coata/bipartite.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace coata {

struct PprConfig {
  double alpha = 0.2;   // teleportation probability
  double r_max = 1e-6;  // push threshold

  void validate() const {
    if (!(alpha > 0.0 && alpha < 1.0))
      throw InputError("ppr: alpha must lie in (0, 1), got " + format_double(alpha));
    if (!(r_max > 0.0)) throw InputError("ppr: r_max must be > 0, got " + format_double(r_max));
  }
};

/// Approximate PPR scores for one source, plus the final residue over V so
/// callers can check the push invariants. Entries sorted by node id.
struct PprResult {
  Index source = 0;
  std::vector<std::pair<Index, double>> pi_hat;
  std::vector<std::pair<Index, double>> residue;
  long pushes = 0;

  double pi_sum() const;
  double residue_sum() const;
};

/// Reusable scratch buffers so sweeping every source does not reallocate.
class PprWorkspace {
 public:
  explicit PprWorkspace(Index n_v, Index n_u);

 private:
  friend PprResult push_ppr(const BipartiteGraph&, Index, const PprConfig&, PprWorkspace&);
  std::vector<double> pi_, res_, attr_res_;
  std::vector<Index> queue_, touched_;
  std::vector<char> queued_, is_touched_;
};

/// Forward push restricted to the node side: residue landing on an attribute
/// is immediately drained back to V, so one (1-alpha) decay applies per
/// two-hop round trip. Terminates once r(v)/d(v) <= r_max everywhere.
/// A source with zero bipartite degree is absorbing: pi_hat(source) = 1.
PprResult push_ppr(const BipartiteGraph& g, Index source, const PprConfig& cfg,
                   PprWorkspace& ws);
PprResult push_ppr(const BipartiteGraph& g, Index source, const PprConfig& cfg);

/// Certificate for the reachability lower bound
/// alpha * (1-alpha)^{2c} * |P_2c| * (w_min^2 / (d_max_v * d_max_u))^c.
struct LowerBoundCertificate {
  Index source = 0;
  Index target = 0;
  int c = 1;
  long path_count = 0;
  double w_min = 0.0;
  double d_max_v = 0.0;
  double d_max_u = 0.0;
  double bound = 0.0;

  double recompute(double alpha) const;
};

/// Brute-force certificate for pi(target): enumerates every alternating
/// length-2c walk source -> a_1 -> ... -> target. Test oracle only; refuses
/// enumerations beyond max_paths.
LowerBoundCertificate lower_bound(const BipartiteGraph& g, Index source, Index target, int c,
                                  double alpha, long max_paths = 10'000'000);

/// One retained candidate edge for reconstruction.
struct ScoreEntry {
  Index target = 0;
  double score = 0.0;
};

/// scores[v] = top-t pi_hat entries for source v, self excluded, sorted by
/// (-score, target).
using ScoreTable = std::vector<std::vector<ScoreEntry>>;

/// Runs push_ppr from every node and keeps the top_t strongest targets per
/// source. workers > 1 shards sources across threads; results do not depend
/// on the shard layout. total_pushes, when given, receives the summed push
/// count.
ScoreTable compute_score_table(const BipartiteGraph& g, const PprConfig& cfg, Index top_t,
                               int workers = 1, long* total_pushes = nullptr);

}  // namespace coata
