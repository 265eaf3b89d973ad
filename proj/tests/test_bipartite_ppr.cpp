#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "coata/bipartite.hpp"
#include "coata/oracles.hpp"
#include "coata/ppr.hpp"
#include "coata/rng.hpp"

#include <algorithm>
#include <cmath>

using namespace coata;

namespace {

BipartiteGraph from_h(Matrix h, SingletonPolicy policy = SingletonPolicy::drop) {
  EnrichedFeatures ef;
  ef.h_matrix = std::move(h);
  BipartiteBuildOptions opts;
  opts.singleton_policy = policy;
  return build_bipartite(ef, opts);
}

/// Two nodes sharing one attribute, unit weights. The round-trip transition
/// from either node is uniform over both, so pi(v0) = 0.6, pi(v1) = 0.4 at
/// alpha = 0.2 by the geometric series.
BipartiteGraph shared_attribute_pair() {
  Matrix h(2, 1);
  h << 1.0, 1.0;
  return from_h(std::move(h));  // the column touches both nodes, so it survives
}

BipartiteGraph random_bip(Rng& rng, Index n_v, Index n_u, double p) {
  Matrix h = Matrix::Zero(n_v, n_u);
  for (Index v = 0; v < n_v; ++v)
    for (Index a = 0; a < n_u; ++a)
      if (rng.bernoulli(p)) h(v, a) = rng.uniform(0.2, 3.0);
  h(0, 0) = 1.0;
  h(1, 0) = 1.5;
  return from_h(std::move(h));
}

}  // namespace

TEST_CASE("build_bipartite drops all-zero columns") {
  Matrix h = Matrix::Zero(3, 3);
  h(0, 0) = 1.0;
  h(1, 0) = 2.0;
  h(0, 2) = 0.5;
  h(2, 2) = 0.5;
  // column 1 is all zero, columns 0 and 2 touch two nodes each
  BipartiteGraph g = from_h(h);
  CHECK(g.num_attributes() == 2);
  CHECK(g.attr_column(0) == 0);
  CHECK(g.attr_column(1) == 2);
}

TEST_CASE("singleton columns: dropped by default, down-weighted on request") {
  Matrix h = Matrix::Zero(3, 2);
  h(0, 0) = 1.0;
  h(1, 0) = 1.0;
  h(2, 1) = 4.0;  // touches only node 2

  BipartiteGraph dropped = from_h(h);
  CHECK(dropped.num_attributes() == 1);
  CHECK(dropped.attr_column(0) == 0);
  CHECK(dropped.node_degree(2) == 0.0);

  BipartiteGraph kept = from_h(h, SingletonPolicy::downweight);
  CHECK(kept.num_attributes() == 2);
  CHECK(kept.attr_degree(1) == doctest::Approx(0.4));  // 4.0 * 0.1
}

TEST_CASE("identity features with drop policy leave nothing") {
  Matrix h = Matrix::Zero(2, 2);
  h(0, 0) = 1.0;
  h(1, 1) = 1.0;
  CHECK_THROWS_AS(from_h(h), InputError);
}

TEST_CASE("negative entries are clamped and counted") {
  Matrix h(2, 1);
  h << 1.0, -0.5;
  BipartiteGraph g = from_h(h, SingletonPolicy::downweight);
  CHECK(g.clamped_negatives() == 1);
  CHECK(g.node_degree(1) == 0.0);
}

TEST_CASE("push_ppr: single node and attribute") {
  Matrix h(1, 1);
  h << 1.0;
  BipartiteGraph g = from_h(h, SingletonPolicy::downweight);
  PprConfig cfg;
  cfg.alpha = 0.2;
  cfg.r_max = 1e-9;
  PprResult res = push_ppr(g, 0, cfg);
  REQUIRE(res.pi_hat.size() == 1);
  CHECK(res.pi_hat[0].second == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("push_ppr: shared-attribute pair splits 0.6 / 0.4") {
  BipartiteGraph g = shared_attribute_pair();
  PprConfig cfg;
  cfg.alpha = 0.2;
  cfg.r_max = 1e-10;
  PprResult res = push_ppr(g, 0, cfg);
  REQUIRE(res.pi_hat.size() == 2);
  CHECK(res.pi_hat[0].first == 0);
  CHECK(res.pi_hat[0].second == doctest::Approx(0.6).epsilon(1e-8));
  CHECK(res.pi_hat[1].second == doctest::Approx(0.4).epsilon(1e-8));
  // and the dense oracle agrees exactly
  Vector pi = oracles::dense_two_hop_ppr(g, 0, 0.2, 200);
  CHECK(pi(0) == doctest::Approx(0.6));
  CHECK(pi(1) == doctest::Approx(0.4));
}

TEST_CASE("push_ppr: isolated source is absorbing") {
  Matrix h = Matrix::Zero(3, 1);
  h(0, 0) = 1.0;
  h(1, 0) = 1.0;
  BipartiteGraph g = from_h(h);  // node 2 has no arcs
  PprConfig cfg;
  PprResult res = push_ppr(g, 2, cfg);
  REQUIRE(res.pi_hat.size() == 1);
  CHECK(res.pi_hat[0].first == 2);
  CHECK(res.pi_hat[0].second == 1.0);
  CHECK(res.residue.empty());
}

TEST_CASE("push invariants hold on fuzzed graphs") {
  Rng rng(31);
  for (int it = 0; it < 25; ++it) {
    const Index n_v = 4 + static_cast<Index>(rng.below(30));
    const Index n_u = 2 + static_cast<Index>(rng.below(12));
    BipartiteGraph g = random_bip(rng, n_v, n_u, rng.uniform(0.1, 0.5));
    PprConfig cfg;
    cfg.alpha = 0.1 + 0.8 * rng.uniform();
    cfg.r_max = std::pow(10.0, -4.0 - 3.0 * rng.uniform());
    const Index source = static_cast<Index>(rng.below(n_v));
    PprResult res = push_ppr(g, source, cfg);

    CHECK(std::abs(res.pi_sum() + res.residue_sum() - 1.0) <= 1e-10);
    for (const auto& [v, score] : res.pi_hat) CHECK(score >= 0.0);
    for (const auto& [v, r] : res.residue) {
      if (g.node_degree(v) > 0.0) CHECK(r / g.node_degree(v) <= cfg.r_max * (1.0 + 1e-12));
    }
    // standard push accounting: every push retires alpha*r_max*d(v) mass
    double d_min = std::numeric_limits<double>::infinity();
    for (Index v = 0; v < n_v; ++v)
      if (g.node_degree(v) > 0.0) d_min = std::min(d_min, g.node_degree(v));
    if (std::isfinite(d_min))
      CHECK(static_cast<double>(res.pushes) <= 1.0 / (cfg.alpha * cfg.r_max * d_min) + 1.0);
  }
}

TEST_CASE("push_ppr underestimates and converges to the oracle") {
  Rng rng(32);
  BipartiteGraph g = random_bip(rng, 50, 20, 0.15);
  PprConfig cfg;
  cfg.alpha = 0.2;
  const Index source = 3;
  Vector pi = oracles::dense_two_hop_ppr(g, source, cfg.alpha, 400);
  double prev_gap = std::numeric_limits<double>::infinity();
  for (double r_max : {1e-4, 1e-6, 1e-8}) {
    cfg.r_max = r_max;
    PprResult res = push_ppr(g, source, cfg);
    Vector pi_hat = Vector::Zero(50);
    for (const auto& [v, s] : res.pi_hat) pi_hat(v) = s;
    CHECK((pi_hat - pi).maxCoeff() <= 1e-12);  // never overshoots
    const double gap = (pi - pi_hat).maxCoeff();
    CHECK(gap <= prev_gap + 1e-15);
    prev_gap = gap;
  }
  CHECK(prev_gap <= 1e-6);
}

TEST_CASE("lower bound certificate on the shared-attribute pair") {
  BipartiteGraph g = shared_attribute_pair();
  LowerBoundCertificate cert = lower_bound(g, 0, 1, 1, 0.2);
  CHECK(cert.path_count == 1);
  CHECK(cert.w_min == doctest::Approx(1.0));
  CHECK(cert.d_max_v == doctest::Approx(1.0));
  CHECK(cert.d_max_u == doctest::Approx(2.0));
  // alpha*(1-alpha)^2 * count * (w_min^2/(d_max_v*d_max_u))^c = 0.2*0.64*0.5
  CHECK(cert.bound == doctest::Approx(0.064));
  Vector pi = oracles::dense_two_hop_ppr(g, 0, 0.2, 200);
  CHECK(pi(1) >= cert.bound);
  CHECK(cert.recompute(0.2) == doctest::Approx(cert.bound));
}

TEST_CASE("lower bound: unreachable target has an empty certificate") {
  Matrix h = Matrix::Zero(4, 2);
  h(0, 0) = 1.0;
  h(1, 0) = 1.0;
  h(2, 1) = 1.0;
  h(3, 1) = 1.0;
  BipartiteGraph g = from_h(h);  // two disconnected pairs
  LowerBoundCertificate cert = lower_bound(g, 0, 2, 1, 0.2);
  CHECK(cert.path_count == 0);
  CHECK(cert.bound == 0.0);
}

TEST_CASE("lower bound never exceeds the oracle score (fuzz)") {
  Rng rng(33);
  int certificated = 0;
  while (certificated < 40) {
    BipartiteGraph g = random_bip(rng, 4 + static_cast<Index>(rng.below(10)), 2 + static_cast<Index>(rng.below(6)),
                                  rng.uniform(0.2, 0.6));
    const Index s = static_cast<Index>(rng.below(g.num_nodes()));
    const Index t = static_cast<Index>(rng.below(g.num_nodes()));
    const int c = 1 + static_cast<int>(rng.below(2));
    const double alpha = rng.uniform(0.1, 0.9);
    LowerBoundCertificate cert = lower_bound(g, s, t, c, alpha);
    if (cert.path_count < 1) continue;
    ++certificated;
    Vector pi = oracles::dense_two_hop_ppr(g, s, alpha, 600);
    CHECK(cert.bound <= pi(t));
  }
}

TEST_CASE("score table: top-t per source, self excluded, ordered") {
  Rng rng(34);
  BipartiteGraph g = random_bip(rng, 30, 8, 0.3);
  PprConfig cfg;
  cfg.r_max = 1e-7;
  const Index top_t = 5;
  long pushes = 0;
  ScoreTable table = compute_score_table(g, cfg, top_t, 1, &pushes);
  REQUIRE(table.size() == 30);
  CHECK(pushes > 0);
  for (Index v = 0; v < 30; ++v) {
    const auto& row = table[static_cast<size_t>(v)];
    CHECK(row.size() <= static_cast<size_t>(top_t));
    for (size_t i = 0; i < row.size(); ++i) {
      CHECK(row[i].target != v);
      if (i > 0) {
        const bool ordered = row[i - 1].score > row[i].score ||
                             (row[i - 1].score == row[i].score && row[i - 1].target < row[i].target);
        CHECK(ordered);
      }
    }
  }
}

TEST_CASE("score table is independent of the worker count") {
  Rng rng(35);
  BipartiteGraph g = random_bip(rng, 40, 10, 0.25);
  PprConfig cfg;
  cfg.r_max = 1e-6;
  ScoreTable one = compute_score_table(g, cfg, 16, 1);
  ScoreTable four = compute_score_table(g, cfg, 16, 4);
  REQUIRE(one.size() == four.size());
  for (size_t v = 0; v < one.size(); ++v) {
    REQUIRE(one[v].size() == four[v].size());
    for (size_t i = 0; i < one[v].size(); ++i) {
      CHECK(one[v][i].target == four[v][i].target);
      CHECK(one[v][i].score == four[v][i].score);
    }
  }
}

TEST_CASE("ppr config validation") {
  BipartiteGraph g = shared_attribute_pair();
  PprConfig bad;
  bad.alpha = 0.0;
  CHECK_THROWS_AS(push_ppr(g, 0, bad), InputError);
  bad.alpha = 0.2;
  bad.r_max = 0.0;
  CHECK_THROWS_AS(push_ppr(g, 0, bad), InputError);
  PprConfig good;
  CHECK_THROWS_AS(push_ppr(g, 5, good), InputError);  // source out of range
}
