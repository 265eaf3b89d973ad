#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "coata/gnn.hpp"
#include "coata/oracles.hpp"
#include "coata/rng.hpp"
#include "test_util.hpp"

#include <cmath>

using namespace coata;

namespace {

BipartiteGraph bip_from(Matrix h) {
  EnrichedFeatures ef;
  ef.h_matrix = std::move(h);
  return build_bipartite(ef);
}

}  // namespace

TEST_CASE("finite_diff_grad recovers d/dw w^2 = 2w") {
  Matrix w(1, 1);
  w << 3.0;
  auto grads = oracles::finite_diff_grad([&] { return w(0, 0) * w(0, 0); }, {&w}, 1e-5);
  REQUIRE(grads.size() == 1);
  CHECK(grads[0](0, 0) == doctest::Approx(6.0).epsilon(1e-6));
  CHECK(w(0, 0) == 3.0);  // parameter restored after probing
}

TEST_CASE("finite_diff_grad walks every entry of every matrix") {
  Matrix a(2, 2), b(1, 3);
  a << 1.0, -2.0, 0.5, 4.0;
  b << 2.0, 0.0, -1.0;
  // f = sum a_ij^2 + 3 * sum b_ij
  auto f = [&] { return a.array().square().sum() + 3.0 * b.sum(); };
  auto grads = oracles::finite_diff_grad(f, {&a, &b}, 1e-5);
  REQUIRE(grads.size() == 2);
  CHECK((grads[0] - 2.0 * a).cwiseAbs().maxCoeff() <= 1e-6);
  CHECK((grads[1].array() - 3.0).abs().maxCoeff() <= 1e-6);
}

TEST_CASE("finite_diff_grad rejects bad steps") {
  Matrix w = Matrix::Ones(1, 1);
  CHECK_THROWS_AS(oracles::finite_diff_grad([&] { return w.sum(); }, {&w}, 0.0), InputError);
  CHECK_THROWS_AS(oracles::finite_diff_grad([&] { return w.sum(); }, {&w}, -1e-5), InputError);
}

TEST_CASE("enumerate_paths: two nodes sharing one attribute") {
  Matrix h(2, 1);
  h << 1.0, 1.0;
  BipartiteGraph g = bip_from(h);
  CHECK(oracles::enumerate_paths(g, 0, 1, 1) == 1);
  CHECK(oracles::enumerate_paths(g, 0, 0, 1) == 1);  // out and back
}

TEST_CASE("enumerate_paths: disconnected pair has no walks") {
  Matrix h = Matrix::Zero(4, 2);
  h(0, 0) = 1.0;
  h(1, 0) = 1.0;
  h(2, 1) = 1.0;
  h(3, 1) = 1.0;
  BipartiteGraph g = bip_from(h);
  CHECK(oracles::enumerate_paths(g, 0, 2, 1) == 0);
  CHECK(oracles::enumerate_paths(g, 0, 2, 3) == 0);
}

TEST_CASE("enumerate_paths: complete bipartite 3x3") {
  Matrix h = Matrix::Ones(3, 3);
  BipartiteGraph g = bip_from(h);
  // distinct source/target at c=1: one walk per shared attribute
  CHECK(oracles::enumerate_paths(g, 0, 1, 1) == 3);
  // c=2: 3 attrs * 3 midpoints * 3 attrs
  CHECK(oracles::enumerate_paths(g, 0, 1, 2) == 27);
  // length-0 walks: exactly the trivial one when source == target
  CHECK(oracles::enumerate_paths(g, 2, 2, 0) == 1);
  CHECK(oracles::enumerate_paths(g, 0, 2, 0) == 0);
}

TEST_CASE("enumerate_paths refuses blown budgets") {
  Matrix h = Matrix::Ones(6, 6);
  BipartiteGraph g = bip_from(h);
  OracleBudget tiny;
  tiny.max_paths = 10;
  CHECK_THROWS_AS(oracles::enumerate_paths(g, 0, 1, 3, tiny), InputError);
  CHECK_THROWS_AS(oracles::enumerate_paths(g, 0, 1, -1), InputError);
}

TEST_CASE("dense caps refuse oversized inputs") {
  OracleBudget tiny;
  tiny.max_dense_dim = 3;
  Matrix h = Matrix::Ones(4, 2);
  BipartiteGraph g = bip_from(h);
  CHECK_THROWS_AS(oracles::dense_two_hop_ppr(g, 0, 0.2, 50, tiny), InputError);

  Matrix x = Matrix::Ones(5, 2);
  NormalizedAdjacency adj = normalize(SparseGraph::from_undirected_edges(5, {{0, 1, 1.0}}));
  CHECK_THROWS_AS(oracles::dense_fixed_point(x, adj, 0.5, tiny), InputError);
}

TEST_CASE("oracle budget validation") {
  OracleBudget b;
  b.fd_step = 1e-9;
  CHECK_THROWS_AS(b.validate(), InputError);
  b.fd_step = 1e-2;
  CHECK_THROWS_AS(b.validate(), InputError);
  b.fd_step = 1e-5;
  b.max_paths = 0;
  CHECK_THROWS_AS(b.validate(), InputError);
}

TEST_CASE("dense_two_hop_ppr matches hand geometric series") {
  // two nodes, one shared attribute: pi(v0) = alpha / (1 - (1-alpha)/2 * ...)
  Matrix h(2, 1);
  h << 1.0, 1.0;
  BipartiteGraph g = bip_from(h);
  Vector pi = oracles::dense_two_hop_ppr(g, 0, 0.2, 300);
  CHECK(pi(0) == doctest::Approx(0.6).epsilon(1e-10));
  CHECK(pi(1) == doctest::Approx(0.4).epsilon(1e-10));
  CHECK(pi.sum() == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("dense_gcn_probs agrees with the sparse forward pass") {
  Rng rng(77);
  SparseGraph g = testutil::gnp(rng, 10, 0.3);
  NormalizedAdjacency adj = normalize(g);
  Matrix x = Matrix::NullaryExpr(10, 4, [&](Eigen::Index, Eigen::Index) { return rng.normal(); });
  Matrix w1 = Matrix::NullaryExpr(4, 6, [&](Eigen::Index, Eigen::Index) { return 0.3 * rng.normal(); });
  Matrix w2 = Matrix::NullaryExpr(6, 3, [&](Eigen::Index, Eigen::Index) { return 0.3 * rng.normal(); });

  Matrix dense_adj = Matrix(adj.matrix);
  Matrix ref = oracles::dense_gcn_probs(dense_adj, x, w1, w2);

  ModelParams params;
  params.w1 = w1;
  params.w2 = w2;
  params.w_proj = Matrix::Ones(6, 2);
  ChannelOutput out = gcn_forward(adj, x, params, 0.0, nullptr);
  CHECK((out.probs - ref).cwiseAbs().maxCoeff() <= 1e-12);
}
