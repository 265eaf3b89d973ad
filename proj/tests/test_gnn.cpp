#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "coata/gnn.hpp"
#include "coata/oracles.hpp"
#include "test_util.hpp"

#include <cmath>

using namespace coata;

namespace {

LabelSet labels_for(std::vector<int> y, int c, std::vector<Split> splits) {
  LabelSet ls;
  ls.labels = std::move(y);
  ls.num_classes = c;
  ls.splits = std::move(splits);
  return ls;
}

ModelParams params_from(Matrix w1, Matrix w2, Matrix w_proj) {
  ModelParams p;
  p.w1 = std::move(w1);
  p.w2 = std::move(w2);
  p.w_proj = std::move(w_proj);
  return p;
}

Prototypes protos_from(Matrix p) {
  Prototypes out;
  out.valid.assign(static_cast<size_t>(p.rows()), 1);
  out.counts = Vector::Ones(p.rows());
  out.p = std::move(p);
  return out;
}

NormalizedAdjacency path_adj(Index n) {
  std::vector<Edge> edges;
  for (Index i = 0; i + 1 < n; ++i) edges.push_back({i, i + 1, 1.0});
  return normalize(SparseGraph::from_undirected_edges(n, edges));
}

}  // namespace

TEST_CASE("zero weights give uniform class probabilities") {
  NormalizedAdjacency adj = path_adj(4);
  Matrix x = Matrix::Random(4, 3);
  ModelParams p = params_from(Matrix::Zero(3, 5), Matrix::Zero(5, 3), Matrix::Zero(5, 2));
  ChannelOutput out = gcn_forward(adj, x, p, 0.0, nullptr);
  CHECK((out.probs.array() - 1.0 / 3.0).abs().maxCoeff() <= 1e-15);
  CHECK(out.z.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("one-node scalar network traces by hand") {
  NormalizedAdjacency adj = normalize(SparseGraph::from_undirected_edges(1, {}));
  Matrix x(1, 1);
  x << 1.0;
  ModelParams p = params_from(Matrix::Ones(1, 1), Matrix::Ones(1, 1), Matrix::Ones(1, 1));
  ChannelOutput out = gcn_forward(adj, x, p, 0.0, nullptr);
  // adj = [1], hidden = relu(1*1) = 1, logits = 1, single class -> prob 1
  CHECK(out.hidden(0, 0) == 1.0);
  CHECK(out.probs(0, 0) == 1.0);
  CHECK(out.z(0, 0) == 1.0);
}

TEST_CASE("row_softmax is shift invariant and normalized") {
  Matrix logits(2, 3);
  logits << 1.0, 2.0, 3.0, -5.0, 0.0, 5.0;
  Matrix probs = row_softmax(logits);
  CHECK(probs.rowwise().sum().isApproxToConstant(1.0, 1e-14));
  Matrix shifted = row_softmax((logits.array() + 100.0).matrix());
  CHECK((probs - shifted).cwiseAbs().maxCoeff() <= 1e-14);
  CHECK(std::isfinite(row_softmax(Matrix::Constant(1, 2, 1e4)).sum()));
}

TEST_CASE("dropout mask takes values in {0, 1/(1-p)} and keeps the mean near 1") {
  Rng rng(9);
  const double p = 0.4;
  Matrix m = dropout_mask(300, 40, p, rng);
  const double keep = 1.0 / (1.0 - p);
  long zeros = 0;
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) {
      const double v = m(i, j);
      CHECK((v == 0.0 || v == doctest::Approx(keep)));
      zeros += v == 0.0;
    }
  CHECK(std::abs(m.mean() - 1.0) <= 0.02);
  CHECK(std::abs(static_cast<double>(zeros) / static_cast<double>(m.size()) - p) <= 0.02);
}

TEST_CASE("cross entropy: exact hits, uniform rows, sum mode, clamping") {
  LabelSet ls = labels_for({0, 1, 0, 1}, 2,
                           {Split::train, Split::train, Split::train, Split::train});
  Matrix onehot(4, 2);
  onehot << 1, 0, 0, 1, 1, 0, 0, 1;
  CHECK(loss_ce(onehot, ls, false) == 0.0);

  Matrix uniform = Matrix::Constant(4, 2, 0.5);
  CHECK(loss_ce(uniform, ls, false) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(loss_ce(uniform, ls, true) == doctest::Approx(4.0 * std::log(2.0)).epsilon(1e-12));

  // only train rows count
  LabelSet mixed = labels_for({0, 1, 0, 1}, 2, {Split::train, Split::test, Split::val, Split::none});
  Matrix probs(4, 2);
  probs << 0.5, 0.5, 1, 0, 1, 0, 1, 0;  // wrong rows are off-split
  CHECK(loss_ce(probs, mixed, false) == doctest::Approx(std::log(2.0)));

  int clamped = 0;
  Matrix zeros(1, 2);
  zeros << 0.0, 1.0;
  LabelSet one = labels_for({0}, 2, {Split::train});
  const double l = loss_ce(zeros, one, false, &clamped);
  CHECK(clamped == 1);
  CHECK(l == doctest::Approx(-std::log(1e-12)));
}

TEST_CASE("consistency loss: zero for identical channels, hand value otherwise") {
  Matrix a(2, 2);
  a << 0.7, 0.3, 0.2, 0.8;
  CHECK(loss_consistency({&a, &a}, a) == 0.0);

  Matrix y(1, 2), probs(1, 2);
  y << 1.0, 0.0;
  probs << 0.5, 0.5;
  // ||(0.5, -0.5)||^2 = 0.5, single channel
  CHECK(loss_consistency({&probs}, y) == doctest::Approx(0.5));

  Matrix b = a;
  b(0, 0) += 0.1;
  b(0, 1) -= 0.1;
  CHECK(loss_consistency({&a, &b}, a) == doctest::Approx(0.5 * 0.02));
}

TEST_CASE("prototypes: confidence-weighted mean of unlabeled votes") {
  // two test nodes, both argmax class 0 with t = 0.5 and 1.0
  Matrix z(2, 2);
  z << 1, 0, 0, 1;
  Matrix probs(2, 3);
  probs << 0.5, 0.25, 0.25, 1.0, 0.0, 0.0;
  LabelSet ls = labels_for({-1, -1}, 3, {Split::test, Split::test});
  Prototypes pr = allocate_prototypes(z, probs, ls);
  REQUIRE(pr.valid[0]);
  CHECK_FALSE(pr.valid[1]);
  CHECK_FALSE(pr.valid[2]);
  CHECK(pr.valid_count() == 1);
  CHECK(pr.counts(0) == doctest::Approx(1.5));
  CHECK(pr.p(0, 0) == doctest::Approx(1.0 / 3.0));
  CHECK(pr.p(0, 1) == doctest::Approx(2.0 / 3.0));
  CHECK(pr.t(0) == 0.5);
  CHECK(pr.t(1) == 1.0);
  CHECK(pr.t_from_probs[0]);
}

TEST_CASE("prototypes: train nodes anchor with full confidence at their label") {
  Matrix z(2, 2);
  z << 2, 0, 0, 4;
  Matrix probs(2, 2);
  probs << 0.1, 0.9, 0.6, 0.4;  // would vote class 1 / class 0 if unlabeled
  LabelSet ls = labels_for({0, 1}, 2, {Split::train, Split::train});
  Prototypes pr = allocate_prototypes(z, probs, ls);
  CHECK(pr.p.row(0) == Matrix(z.row(0)));  // label wins over argmax
  CHECK(pr.p.row(1) == Matrix(z.row(1)));
  CHECK(pr.t(0) == 1.0);
  CHECK_FALSE(pr.t_from_probs[0]);
}

TEST_CASE("prototypes: confidence floor filters weak votes") {
  Matrix z(2, 2);
  z << 1, 0, 0, 1;
  Matrix probs(2, 2);
  probs << 0.52, 0.48, 0.95, 0.05;
  LabelSet ls = labels_for({-1, -1}, 2, {Split::test, Split::test});
  Prototypes pr = allocate_prototypes(z, probs, ls, 0.9);
  CHECK(pr.counts(0) == doctest::Approx(0.95));  // the 0.52 vote is dropped
  CHECK(pr.p(0, 0) == doctest::Approx(0.0));
  CHECK(pr.p(0, 1) == doctest::Approx(1.0));
  CHECK_FALSE(pr.valid[1]);
}

TEST_CASE("dpa loss: aligned orthogonal prototypes hit the -1/tau floor") {
  Matrix p(2, 2);
  p << 1, 0, 0, 1;
  Prototypes a = protos_from(p), b = protos_from(p);
  bool degenerate = false;
  // diag cos = 1, cross cos = 0: per class -log(e^2 / e^0) = -2
  CHECK(loss_dpa(a, b, 0.5, &degenerate) == doctest::Approx(-2.0).epsilon(1e-12));
  CHECK_FALSE(degenerate);
}

TEST_CASE("dpa loss: identical prototypes give log(c-1)") {
  Matrix p = Matrix::Ones(3, 4);
  Prototypes a = protos_from(p), b = protos_from(p);
  CHECK(loss_dpa(a, b, 0.5) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("dpa loss: cosine makes it scale invariant") {
  Rng rng(12);
  Matrix p(3, 5), q(3, 5);
  for (Index i = 0; i < 3; ++i)
    for (Index j = 0; j < 5; ++j) {
      p(i, j) = rng.normal();
      q(i, j) = rng.normal();
    }
  const double base = loss_dpa(protos_from(p), protos_from(q), 0.7);
  CHECK(loss_dpa(protos_from(3.0 * p), protos_from(0.25 * q), 0.7) == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("dpa loss: fewer than two shared classes is degenerate") {
  Matrix p(2, 2);
  p << 1, 0, 0, 1;
  Prototypes a = protos_from(p), b = protos_from(p);
  a.valid[1] = 0;  // only class 0 on one side
  bool degenerate = false;
  CHECK(loss_dpa(a, b, 0.5, &degenerate) == 0.0);
  CHECK(degenerate);
}

TEST_CASE("dpa prototype gradients point downhill and match finite differences") {
  Rng rng(13);
  Matrix p(3, 4), q(3, 4);
  for (Index i = 0; i < 3; ++i)
    for (Index j = 0; j < 4; ++j) {
      p(i, j) = rng.normal();
      q(i, j) = rng.normal();
    }
  Prototypes a = protos_from(p), b = protos_from(q);
  const double tau = 0.5;
  DpaGradients g = dpa_prototype_gradients(a, b, tau);

  auto fd = oracles::finite_diff_grad(
      [&] { return loss_dpa(protos_from(a.p), protos_from(b.p), tau); }, {&a.p, &b.p}, 1e-6);
  CHECK((g.dp - fd[0]).cwiseAbs().maxCoeff() <= 1e-6);
  CHECK((g.dp_prime - fd[1]).cwiseAbs().maxCoeff() <= 1e-6);

  const double before = loss_dpa(a, b, tau);
  Prototypes a2 = protos_from(a.p - 1e-3 * g.dp);
  Prototypes b2 = protos_from(b.p - 1e-3 * g.dp_prime);
  CHECK(loss_dpa(a2, b2, tau) < before);
}

TEST_CASE("forward_all: total recomposes from its parts, twin channel collapses") {
  Rng rng(14);
  SparseGraph g = testutil::gnp(rng, 12, 0.3);
  NormalizedAdjacency adj = normalize(g);
  Matrix x = Matrix::NullaryExpr(12, 5, [&](Eigen::Index, Eigen::Index) { return rng.normal(); });
  std::vector<int> y(12);
  std::vector<Split> sp(12);
  for (int i = 0; i < 12; ++i) {
    y[static_cast<size_t>(i)] = i % 2;
    sp[static_cast<size_t>(i)] = i < 4 ? Split::train : (i < 8 ? Split::val : Split::test);
  }
  LabelSet ls = labels_for(y, 2, sp);

  GnnConfig cfg;
  cfg.hidden_dim = 7;
  cfg.proj_dim = 4;
  cfg.dropout = 0.0;
  Rng init(21);
  ModelParams params = ModelParams::init(5, 7, 2, 4, init);

  // twin channel: same adjacency, dropout off -> identical outputs
  ForwardCache cache = forward_all(params, adj, {adj}, x, ls, cfg, 21, 0, true);
  CHECK(cache.losses.ce_aug == doctest::Approx(cache.losses.ce).epsilon(1e-14));
  CHECK(cache.losses.co == doctest::Approx(0.0));
  const double recomposed = cache.losses.ce + cfg.lambda1 * cache.losses.ce_aug +
                            cfg.lambda2 * cache.losses.co + cfg.lambda3 * cache.losses.dpa;
  CHECK(cache.losses.total == doctest::Approx(recomposed).epsilon(1e-14));
  CHECK(cache.losses.ce == doctest::Approx(loss_ce(cache.original.probs, ls, false)));

  // distinct second channel: components still recompose
  NormalizedAdjacency adj2 = normalize(testutil::gnp(rng, 12, 0.4));
  cache = forward_all(params, adj, {adj2}, x, ls, cfg, 21, 0, true);
  const double re2 = cache.losses.ce + cfg.lambda1 * cache.losses.ce_aug +
                     cfg.lambda2 * cache.losses.co + cfg.lambda3 * cache.losses.dpa;
  CHECK(cache.losses.total == doctest::Approx(re2).epsilon(1e-14));
  CHECK(cache.losses.co > 0.0);
}

TEST_CASE("backward: dead ReLU zeroes the first-layer gradient") {
  NormalizedAdjacency adj = path_adj(6);
  Matrix x = Matrix::Constant(6, 3, -1.0);  // negative input, positive weights
  LabelSet ls = labels_for({0, 1, 0, 1, 0, 1}, 2,
                           {Split::train, Split::train, Split::train, Split::train, Split::val, Split::test});
  GnnConfig cfg;
  cfg.hidden_dim = 4;
  cfg.proj_dim = 3;
  cfg.dropout = 0.0;
  ModelParams params = params_from(Matrix::Ones(3, 4), Matrix::Ones(4, 2), Matrix::Ones(4, 3));
  ForwardCache cache = forward_all(params, adj, {adj}, x, ls, cfg, 3, 0, true);
  CHECK(cache.original.hidden.cwiseAbs().maxCoeff() == 0.0);
  Gradients g = backward(cache, params, adj, {adj}, ls, cfg);
  CHECK(g.w1.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("backward: projection gradient scales linearly with lambda3") {
  Rng rng(15);
  SparseGraph gr = testutil::gnp(rng, 10, 0.35);
  NormalizedAdjacency adj = normalize(gr);
  Matrix x = Matrix::NullaryExpr(10, 4, [&](Eigen::Index, Eigen::Index) { return rng.normal(); });
  std::vector<int> y(10);
  std::vector<Split> sp(10);
  for (int i = 0; i < 10; ++i) {
    y[static_cast<size_t>(i)] = i % 2;
    sp[static_cast<size_t>(i)] = i < 4 ? Split::train : Split::test;
  }
  LabelSet ls = labels_for(y, 2, sp);
  GnnConfig cfg;
  cfg.hidden_dim = 5;
  cfg.proj_dim = 3;
  cfg.dropout = 0.0;
  Rng init(7);
  ModelParams params = ModelParams::init(4, 5, 2, 3, init);
  ForwardCache cache = forward_all(params, adj, {adj}, x, ls, cfg, 7, 0, true);

  // w_proj feeds only the alignment term, so its gradient is proportional
  Gradients g1 = backward(cache, params, adj, {adj}, ls, cfg);
  GnnConfig cfg2 = cfg;
  cfg2.lambda3 = 2.0 * cfg.lambda3;
  Gradients g2 = backward(cache, params, adj, {adj}, ls, cfg2);
  CHECK((g2.w_proj - 2.0 * g1.w_proj).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(g1.w_proj.cwiseAbs().maxCoeff() > 0.0);

  GnnConfig cfg0 = cfg;
  cfg0.lambda3 = 0.0;
  Gradients g0 = backward(cache, params, adj, {adj}, ls, cfg0);
  CHECK(g0.w_proj.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("sgd_step follows the momentum + weight decay convention") {
  ModelParams p = params_from(Matrix::Constant(1, 1, 1.0), Matrix::Constant(1, 1, 2.0),
                              Matrix::Constant(1, 1, -1.0));
  Gradients g;
  g.w1 = Matrix::Constant(1, 1, 0.5);
  g.w2 = Matrix::Zero(1, 1);
  g.w_proj = Matrix::Zero(1, 1);
  SgdState s = SgdState::zeros_like(p);

  sgd_step(p, g, s, 0.1, 0.9, 0.0);
  CHECK(p.w1(0, 0) == doctest::Approx(1.0 - 0.1 * 0.5));
  sgd_step(p, g, s, 0.1, 0.9, 0.0);
  // v = 0.9*0.5 + 0.5 = 0.95
  CHECK(p.w1(0, 0) == doctest::Approx(0.95 - 0.1 * 0.95));

  // weight decay folds into the gradient before the velocity update
  ModelParams q = params_from(Matrix::Constant(1, 1, 2.0), Matrix::Zero(1, 1), Matrix::Zero(1, 1));
  SgdState s2 = SgdState::zeros_like(q);
  Gradients zero;
  zero.w1 = Matrix::Zero(1, 1);
  zero.w2 = Matrix::Zero(1, 1);
  zero.w_proj = Matrix::Zero(1, 1);
  sgd_step(q, zero, s2, 0.5, 0.0, 0.1);
  // v = 0 + (0 + 0.1*2) = 0.2; w = 2 - 0.5*0.2 = 1.9
  CHECK(q.w1(0, 0) == doctest::Approx(1.9));
}

TEST_CASE("accuracy counts argmax hits per split") {
  Matrix probs(4, 2);
  probs << 0.9, 0.1, 0.2, 0.8, 0.6, 0.4, 0.3, 0.7;
  LabelSet all_right = labels_for({0, 1, 0, 1}, 2,
                                  {Split::test, Split::test, Split::test, Split::test});
  CHECK(accuracy(probs, all_right, Split::test) == 1.0);
  LabelSet all_wrong = labels_for({1, 0, 1, 0}, 2,
                                  {Split::test, Split::test, Split::test, Split::test});
  CHECK(accuracy(probs, all_wrong, Split::test) == 0.0);
  LabelSet three = labels_for({0, 1, 0, 0}, 2,
                              {Split::val, Split::val, Split::val, Split::val});
  CHECK(accuracy(probs, three, Split::val) == 0.75);
}

TEST_CASE("config validation rejects out-of-range knobs") {
  GnnConfig cfg;
  cfg.dropout = 1.0;
  CHECK_THROWS_AS(cfg.validate(), InputError);
  cfg = {};
  cfg.tau = 0.0;
  CHECK_THROWS_AS(cfg.validate(), InputError);
  cfg = {};
  cfg.epochs = -1;
  CHECK_THROWS_AS(cfg.validate(), InputError);
  cfg = {};
  cfg.lambda1 = -0.5;
  CHECK_THROWS_AS(cfg.validate(), InputError);
}
