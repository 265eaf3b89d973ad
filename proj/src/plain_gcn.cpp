#include "coata/plain_gcn.hpp"

#include <cmath>

namespace coata {

namespace {

struct PlainCache {
  Matrix a1, s1, hidden, a2, logits, probs, h_mask;
};

PlainCache plain_forward(const NormalizedAdjacency& adj, const Matrix& x,
                         const ModelParams& params, double dropout, Rng* rng) {
  PlainCache c;
  if (dropout > 0.0) {
    Matrix x_mask = dropout_mask(x.rows(), x.cols(), dropout, *rng);
    c.a1 = spmm(adj, (x.array() * x_mask.array()).matrix());
  } else {
    c.a1 = spmm(adj, x);
  }
  c.s1 = c.a1 * params.w1;
  c.hidden = c.s1.cwiseMax(0.0);
  if (dropout > 0.0) {
    c.h_mask = dropout_mask(c.hidden.rows(), c.hidden.cols(), dropout, *rng);
    c.a2 = spmm(adj, (c.hidden.array() * c.h_mask.array()).matrix());
  } else {
    c.a2 = spmm(adj, c.hidden);
  }
  c.logits = c.a2 * params.w2;
  c.probs = row_softmax(c.logits);
  return c;
}

Gradients plain_backward(const PlainCache& c, const NormalizedAdjacency& adj,
                         const ModelParams& params, const LabelSet& labels, bool ce_sum) {
  Index train_count = 0;
  for (Split s : labels.splits) train_count += s == Split::train ? 1 : 0;
  const double scale = ce_sum ? 1.0 : 1.0 / static_cast<double>(train_count);

  Matrix dlogits = Matrix::Zero(c.probs.rows(), c.probs.cols());
  for (Index i = 0; i < c.probs.rows(); ++i) {
    if (labels.splits[static_cast<size_t>(i)] != Split::train) continue;
    dlogits.row(i) = c.probs.row(i) * scale;
    dlogits(i, labels.labels[static_cast<size_t>(i)]) -= scale;
  }

  Gradients g = Gradients::zeros_like(params);
  g.w2 = c.a2.transpose() * dlogits;
  Matrix dhidden = spmm(adj, (dlogits * params.w2.transpose()).eval());
  if (c.h_mask.size() > 0) dhidden.array() *= c.h_mask.array();
  Matrix ds1 = (dhidden.array() * (c.s1.array() > 0.0).cast<double>()).matrix();
  g.w1 = c.a1.transpose() * ds1;
  g.check_finite("plain gcn backward");
  return g;
}

}  // namespace

TrainResult train_plain_gcn(const NormalizedAdjacency& adj, const Matrix& x,
                            const LabelSet& labels, const GnnConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  labels.validate();
  if (labels.nodes_in(Split::train).empty()) throw InputError("train: empty train split");
  if (labels.nodes_in(Split::val).empty()) throw InputError("train: empty val split");

  Rng init_rng(seed);
  TrainResult out;
  out.params = ModelParams::init(x.cols(), cfg.hidden_dim, labels.num_classes, cfg.proj_dim,
                                 init_rng);
  ModelParams params = out.params;
  SgdState mom = SgdState::zeros_like(params);
  double best_val = -1.0;

  for (int e = 0; e < cfg.epochs; ++e) {
    const double drop = cfg.deterministic ? 0.0 : cfg.dropout;
    Rng rng = Rng::fork(seed, static_cast<std::uint64_t>(e), 0);
    PlainCache cache = plain_forward(adj, x, params, drop, &rng);

    EpochMetrics em;
    em.epoch = e;
    em.losses.ce = loss_ce(cache.probs, labels, cfg.ce_sum);
    em.losses.total = em.losses.ce;
    if (!std::isfinite(em.losses.total)) {
      out.diverged = true;
      break;
    }
    Gradients g = plain_backward(cache, adj, params, labels, cfg.ce_sum);
    sgd_step(params, g, mom, cfg.lr, cfg.momentum, cfg.weight_decay);

    Matrix probs = predict_probs(params, adj, x);
    em.train_acc = accuracy(probs, labels, Split::train);
    em.val_acc = accuracy(probs, labels, Split::val);
    out.history.push_back(em);
    if (em.val_acc > best_val) {
      best_val = em.val_acc;
      out.best_epoch = e;
      out.best_val_acc = em.val_acc;
      out.params = params;
    }
  }
  return out;
}

}  // namespace coata
