#include "coata/gnn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

namespace coata {

void GnnConfig::validate() const {
  if (hidden_dim < 1 || proj_dim < 1) throw InputError("gnn: dims must be >= 1");
  if (!(dropout >= 0.0 && dropout < 1.0)) throw InputError("gnn: dropout must be in [0, 1)");
  if (!(lr > 0.0)) throw InputError("gnn: lr must be > 0");
  if (!(momentum >= 0.0 && momentum < 1.0)) throw InputError("gnn: momentum must be in [0, 1)");
  if (weight_decay < 0.0) throw InputError("gnn: weight_decay must be >= 0");
  if (epochs < 0) throw InputError("gnn: epochs must be >= 0");
  if (lambda1 < 0.0 || lambda2 < 0.0 || lambda3 < 0.0)
    throw InputError("gnn: lambdas must be >= 0");
  if (!(tau > 0.0)) throw InputError("gnn: tau must be > 0");
  if (t_min < 0.0 || t_min > 1.0) throw InputError("gnn: t_min must be in [0, 1]");
  if (sharpen && !(sharpen_temp > 0.0)) throw InputError("gnn: sharpen_temp must be > 0");
}

namespace {

Matrix glorot(Index rows, Index cols, Rng& rng) {
  const double a = std::sqrt(6.0 / static_cast<double>(rows + cols));
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = rng.uniform(-a, a);
  return m;
}

void require_finite(const Matrix& m, const char* name) {
  if (!m.allFinite()) throw InternalError(std::string("non-finite values in ") + name);
}

/// dlogits from dprobs through a row softmax.
Matrix softmax_backward(const Matrix& probs, const Matrix& dprobs) {
  Matrix dlogits(probs.rows(), probs.cols());
  for (Index i = 0; i < probs.rows(); ++i) {
    const double dot = dprobs.row(i).dot(probs.row(i));
    dlogits.row(i) = (probs.row(i).array() * (dprobs.row(i).array() - dot)).matrix();
  }
  return dlogits;
}

/// (probs - onehot) * scale on train rows, zero elsewhere.
Matrix ce_logit_grad(const Matrix& probs, const LabelSet& labels, double scale) {
  Matrix d = Matrix::Zero(probs.rows(), probs.cols());
  for (Index i = 0; i < probs.rows(); ++i) {
    if (labels.splits[static_cast<size_t>(i)] != Split::train) continue;
    d.row(i) = probs.row(i) * scale;
    d(i, labels.labels[static_cast<size_t>(i)]) -= scale;
  }
  return d;
}

double safe_cos(const Eigen::RowVectorXd& u, const Eigen::RowVectorXd& v) {
  const double nu = u.norm(), nv = v.norm();
  if (nu == 0.0 || nv == 0.0) return 0.0;
  return u.dot(v) / (nu * nv);
}

/// Rows of dP flow back to each voting node's z (and, for unlabeled nodes,
/// to its winning probability through the confidence weight).
void prototype_backward(const Prototypes& proto, const Matrix& dP, const Matrix& z, Matrix& dz,
                        Matrix& dprobs) {
  const Index n = z.rows();
  for (Index i = 0; i < n; ++i) {
    const int j = proto.assigned[static_cast<size_t>(i)];
    if (j < 0 || !proto.valid[static_cast<size_t>(j)]) continue;
    const double total = proto.counts[j];
    if (total <= 0.0) continue;
    const double ti = proto.t[i];
    dz.row(i) += (ti / total) * dP.row(j);
    if (proto.t_from_probs[static_cast<size_t>(i)]) {
      const double dt = dP.row(j).dot((z.row(i) - proto.p.row(j))) / total;
      dprobs(i, j) += dt;
    }
  }
}

struct ChannelGrads {
  Matrix dlogits;  // direct logit-space part (cross entropy)
  Matrix dprobs;   // prob-space part (consistency, confidence weights)
  Matrix dz;       // projection-space part (prototypes)
  bool has_dz = false;
};

void channel_backward(const ChannelOutput& ch, const NormalizedAdjacency& adj,
                      const ModelParams& params, ChannelGrads& cg, Gradients& g) {
  Matrix dlogits = std::move(cg.dlogits);
  if (cg.dprobs.size() > 0) dlogits += softmax_backward(ch.probs, cg.dprobs);

  g.w2 += ch.a2.transpose() * dlogits;
  Matrix da2 = dlogits * params.w2.transpose();
  Matrix dhidden = spmm(adj, da2);  // adjacency is symmetric
  if (ch.h_mask.size() > 0) dhidden.array() *= ch.h_mask.array();
  if (cg.has_dz) {
    g.w_proj += ch.hidden.transpose() * cg.dz;
    dhidden += cg.dz * params.w_proj.transpose();
  }
  Matrix ds1 = (dhidden.array() * (ch.s1.array() > 0.0).cast<double>()).matrix();
  g.w1 += ch.a1.transpose() * ds1;
}

}  // namespace

ModelParams ModelParams::init(Index in_dim, Index hidden_dim, Index num_classes, Index proj_dim,
                              Rng& rng) {
  if (in_dim < 1 || hidden_dim < 1 || num_classes < 2 || proj_dim < 1)
    throw InputError("model init: bad dimensions");
  ModelParams p;
  p.w1 = glorot(in_dim, hidden_dim, rng);
  p.w2 = glorot(hidden_dim, num_classes, rng);
  p.w_proj = glorot(hidden_dim, proj_dim, rng);
  return p;
}

void ModelParams::check_finite(const std::string& where) const {
  if (!w1.allFinite()) throw InternalError(where + ": non-finite w1");
  if (!w2.allFinite()) throw InternalError(where + ": non-finite w2");
  if (!w_proj.allFinite()) throw InternalError(where + ": non-finite w_proj");
}

Gradients Gradients::zeros_like(const ModelParams& p) {
  Gradients g;
  g.w1 = Matrix::Zero(p.w1.rows(), p.w1.cols());
  g.w2 = Matrix::Zero(p.w2.rows(), p.w2.cols());
  g.w_proj = Matrix::Zero(p.w_proj.rows(), p.w_proj.cols());
  return g;
}

void Gradients::check_finite(const std::string& where) const {
  if (!w1.allFinite()) throw InternalError(where + ": non-finite gradient for w1");
  if (!w2.allFinite()) throw InternalError(where + ": non-finite gradient for w2");
  if (!w_proj.allFinite()) throw InternalError(where + ": non-finite gradient for w_proj");
}

Matrix dropout_mask(Index rows, Index cols, double p, Rng& rng) {
  const double keep = 1.0 - p;
  const double inv = 1.0 / keep;
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = rng.uniform() < keep ? inv : 0.0;
  return m;
}

Matrix row_softmax(const Matrix& logits) {
  Matrix p(logits.rows(), logits.cols());
  for (Index i = 0; i < logits.rows(); ++i) {
    const double m = logits.row(i).maxCoeff();
    Eigen::ArrayXd e = (logits.row(i).array() - m).exp();
    p.row(i) = (e / e.sum()).matrix();
  }
  return p;
}

ChannelOutput gcn_forward(const NormalizedAdjacency& adj, const Matrix& x,
                          const ModelParams& params, double dropout, Rng* rng) {
  if (!(dropout >= 0.0 && dropout < 1.0)) throw InputError("gcn_forward: dropout must be in [0, 1)");
  if (x.cols() != params.w1.rows())
    throw InputError("gcn_forward: feature dim " + std::to_string(x.cols()) +
                     " != w1 rows " + std::to_string(params.w1.rows()));
  if (params.w1.cols() != params.w2.rows() || params.w1.cols() != params.w_proj.rows())
    throw InputError("gcn_forward: hidden dims of w1/w2/w_proj disagree");
  params.check_finite("gcn_forward");
  const bool masked = dropout > 0.0;
  if (masked && rng == nullptr) throw InternalError("gcn_forward: dropout requested without an rng");

  ChannelOutput ch;
  if (masked) {
    Matrix x_mask = dropout_mask(x.rows(), x.cols(), dropout, *rng);
    ch.a1 = spmm(adj, (x.array() * x_mask.array()).matrix());
  } else {
    ch.a1 = spmm(adj, x);
  }
  ch.s1 = ch.a1 * params.w1;
  ch.hidden = ch.s1.cwiseMax(0.0);
  if (masked) {
    ch.h_mask = dropout_mask(ch.hidden.rows(), ch.hidden.cols(), dropout, *rng);
    ch.a2 = spmm(adj, (ch.hidden.array() * ch.h_mask.array()).matrix());
  } else {
    ch.a2 = spmm(adj, ch.hidden);
  }
  ch.logits = ch.a2 * params.w2;
  require_finite(ch.logits, "logits");
  ch.probs = row_softmax(ch.logits);
  ch.z = ch.hidden * params.w_proj;
  require_finite(ch.z, "z");
  return ch;
}

double loss_ce(const Matrix& probs, const LabelSet& labels, bool sum_mode, int* clamped) {
  if (probs.rows() != labels.size()) throw InputError("loss_ce: probs rows != label count");
  double acc = 0.0;
  Index count = 0;
  int clamps = 0;
  for (Index i = 0; i < probs.rows(); ++i) {
    if (labels.splits[static_cast<size_t>(i)] != Split::train) continue;
    const int y = labels.labels[static_cast<size_t>(i)];
    if (y < 0 || y >= probs.cols()) throw InternalError("loss_ce: train node without a valid label");
    double p = probs(i, y);
    if (p < 1e-12) {
      p = 1e-12;
      ++clamps;
    }
    acc -= std::log(p);
    ++count;
  }
  if (count == 0) throw InputError("loss_ce: no train nodes");
  if (clamped) *clamped += clamps;
  return sum_mode ? acc : acc / static_cast<double>(count);
}

double loss_consistency(const std::vector<const Matrix*>& aug_probs, const Matrix& y_agg) {
  if (aug_probs.empty()) throw InputError("loss_consistency: needs at least one channel");
  double acc = 0.0;
  for (const Matrix* m : aug_probs) {
    if (m->rows() != y_agg.rows() || m->cols() != y_agg.cols())
      throw InputError("loss_consistency: shape mismatch");
    acc += (y_agg - *m).squaredNorm();
  }
  return acc / static_cast<double>(aug_probs.size());
}

int Prototypes::valid_count() const {
  int c = 0;
  for (char v : valid) c += v ? 1 : 0;
  return c;
}

Prototypes allocate_prototypes(const Matrix& z, const Matrix& probs, const LabelSet& labels,
                               double t_min) {
  if (z.rows() != probs.rows() || z.rows() != labels.size())
    throw InputError("allocate_prototypes: row counts disagree");
  const Index n = z.rows();
  const int c = labels.num_classes;

  Prototypes out;
  out.p = Matrix::Zero(c, z.cols());
  out.counts = Vector::Zero(c);
  out.valid.assign(static_cast<size_t>(c), 0);
  out.assigned.assign(static_cast<size_t>(n), -1);
  out.t = Vector::Zero(n);
  out.t_from_probs.assign(static_cast<size_t>(n), 0);

  for (Index i = 0; i < n; ++i) {
    int cls;
    double t;
    if (labels.splits[static_cast<size_t>(i)] == Split::train) {
      cls = labels.labels[static_cast<size_t>(i)];
      t = 1.0;
    } else {
      Index arg = 0;
      probs.row(i).maxCoeff(&arg);  // first maximum on ties
      cls = static_cast<int>(arg);
      t = probs(i, arg);
      if (t < t_min) continue;
      out.t_from_probs[static_cast<size_t>(i)] = 1;
    }
    out.assigned[static_cast<size_t>(i)] = cls;
    out.t[i] = t;
    out.counts[cls] += t;
    out.p.row(cls) += t * z.row(i);
  }
  for (int j = 0; j < c; ++j) {
    if (out.counts[j] > 0.0) {
      out.p.row(j) /= out.counts[j];
      out.valid[static_cast<size_t>(j)] = 1;
    }
  }
  return out;
}

namespace {

/// Shared scaffolding for loss_dpa and its gradients: the mutually valid
/// class list and the cos/tau score matrix over it.
struct DpaScores {
  std::vector<int> classes;
  Matrix s;  // c' x c', s(i,q) = cos(p_i, p'_q) / tau
};

DpaScores dpa_scores(const Prototypes& a, const Prototypes& b, double tau) {
  DpaScores out;
  const size_t c = std::min(a.valid.size(), b.valid.size());
  for (size_t j = 0; j < c; ++j)
    if (a.valid[j] && b.valid[j]) out.classes.push_back(static_cast<int>(j));
  const Index m = static_cast<Index>(out.classes.size());
  out.s.resize(m, m);
  for (Index i = 0; i < m; ++i)
    for (Index q = 0; q < m; ++q)
      out.s(i, q) = safe_cos(a.p.row(out.classes[static_cast<size_t>(i)]),
                             b.p.row(out.classes[static_cast<size_t>(q)])) /
                    tau;
  return out;
}

double lse_excluding(const Matrix& s, Index fixed, bool fixed_is_row) {
  const Index m = s.rows();
  double mx = -std::numeric_limits<double>::infinity();
  for (Index q = 0; q < m; ++q) {
    if (q == fixed) continue;
    mx = std::max(mx, fixed_is_row ? s(fixed, q) : s(q, fixed));
  }
  double acc = 0.0;
  for (Index q = 0; q < m; ++q) {
    if (q == fixed) continue;
    acc += std::exp((fixed_is_row ? s(fixed, q) : s(q, fixed)) - mx);
  }
  return mx + std::log(acc);
}

}  // namespace

double loss_dpa(const Prototypes& a, const Prototypes& b, double tau, bool* degenerate) {
  if (!(tau > 0.0)) throw InputError("loss_dpa: tau must be > 0");
  DpaScores sc = dpa_scores(a, b, tau);
  const Index m = static_cast<Index>(sc.classes.size());
  if (m < 2) {
    if (degenerate) *degenerate = true;
    return 0.0;
  }
  double acc = 0.0;
  for (Index i = 0; i < m; ++i)
    acc += 2.0 * sc.s(i, i) - lse_excluding(sc.s, i, true) - lse_excluding(sc.s, i, false);
  return -acc / (2.0 * static_cast<double>(m));
}

DpaGradients dpa_prototype_gradients(const Prototypes& a, const Prototypes& b, double tau) {
  if (!(tau > 0.0)) throw InputError("dpa gradients: tau must be > 0");
  DpaGradients out;
  out.dp = Matrix::Zero(a.p.rows(), a.p.cols());
  out.dp_prime = Matrix::Zero(b.p.rows(), b.p.cols());

  DpaScores sc = dpa_scores(a, b, tau);
  const Index m = static_cast<Index>(sc.classes.size());
  if (m < 2) return out;
  const double inv = 1.0 / (2.0 * static_cast<double>(m));

  // dL/ds: -1/c' on the diagonal; off-diagonal entries take the softmax of
  // their row (first log term) plus of their column (second log term).
  Matrix g = Matrix::Zero(m, m);
  for (Index i = 0; i < m; ++i) {
    g(i, i) = -2.0 * inv;
    const double row_lse = lse_excluding(sc.s, i, true);
    const double col_lse = lse_excluding(sc.s, i, false);
    for (Index q = 0; q < m; ++q) {
      if (q == i) continue;
      g(i, q) += inv * std::exp(sc.s(i, q) - row_lse);
      g(q, i) += inv * std::exp(sc.s(q, i) - col_lse);
    }
  }

  for (Index i = 0; i < m; ++i) {
    const int ci = sc.classes[static_cast<size_t>(i)];
    const Eigen::RowVectorXd u = a.p.row(ci);
    const double nu = u.norm();
    for (Index q = 0; q < m; ++q) {
      const int cq = sc.classes[static_cast<size_t>(q)];
      const Eigen::RowVectorXd v = b.p.row(cq);
      const double nv = v.norm();
      if (nu == 0.0 || nv == 0.0) continue;  // cos pinned to 0, no gradient
      const double cos_uv = u.dot(v) / (nu * nv);
      const double coef = g(i, q) / tau;
      out.dp.row(ci) += coef * (v / (nu * nv) - cos_uv * u / (nu * nu));
      out.dp_prime.row(cq) += coef * (u / (nu * nv) - cos_uv * v / (nv * nv));
    }
  }
  return out;
}

ForwardCache forward_all(const ModelParams& params, const NormalizedAdjacency& original,
                         const std::vector<NormalizedAdjacency>& augmented, const Matrix& x,
                         const LabelSet& labels, const GnnConfig& cfg, std::uint64_t seed,
                         int epoch, bool training, const Matrix* frozen_y_agg) {
  cfg.validate();
  labels.validate();
  const double drop = (training && !cfg.deterministic) ? cfg.dropout : 0.0;
  const size_t S = augmented.size();

  ForwardCache cache;
  {
    Rng rng = Rng::fork(seed, static_cast<std::uint64_t>(epoch), 0);
    cache.original = gcn_forward(original, x, params, drop, &rng);
  }
  cache.augmented.reserve(S);
  for (size_t s = 0; s < S; ++s) {
    Rng rng = Rng::fork(seed, static_cast<std::uint64_t>(epoch), 1 + s);
    cache.augmented.push_back(gcn_forward(augmented[s], x, params, drop, &rng));
  }

  LossBreakdown& L = cache.losses;
  L.lambda1 = cfg.lambda1;
  L.lambda2 = cfg.lambda2;
  L.lambda3 = cfg.lambda3;
  L.ce = loss_ce(cache.original.probs, labels, cfg.ce_sum, &cache.ce_clamped);

  if (S > 0) {
    for (const auto& ch : cache.augmented)
      L.ce_aug += loss_ce(ch.probs, labels, cfg.ce_sum, &cache.ce_clamped);
    L.ce_aug /= static_cast<double>(S);

    if (frozen_y_agg) {
      cache.y_agg = *frozen_y_agg;
    } else {
      cache.y_agg = cache.original.probs;
      for (const auto& ch : cache.augmented) cache.y_agg += ch.probs;
      cache.y_agg /= static_cast<double>(S + 1);
      if (cfg.sharpen) {
        cache.y_agg = cache.y_agg.array().pow(1.0 / cfg.sharpen_temp).matrix();
        for (Index i = 0; i < cache.y_agg.rows(); ++i)
          cache.y_agg.row(i) /= cache.y_agg.row(i).sum();
      }
    }

    std::vector<const Matrix*> aug_probs;
    aug_probs.reserve(S);
    for (const auto& ch : cache.augmented) aug_probs.push_back(&ch.probs);
    L.co = loss_consistency(aug_probs, cache.y_agg);

    cache.proto_orig = allocate_prototypes(cache.original.z, cache.original.probs, labels,
                                           cfg.t_min);
    cache.proto_aug.reserve(S);
    for (const auto& ch : cache.augmented) {
      cache.proto_aug.push_back(allocate_prototypes(ch.z, ch.probs, labels, cfg.t_min));
      L.dpa += loss_dpa(cache.proto_orig, cache.proto_aug.back(), cfg.tau,
                        &cache.dpa_degenerate);
    }
    L.dpa /= static_cast<double>(S);
  }

  L.total = L.ce + cfg.lambda1 * L.ce_aug + cfg.lambda2 * L.co + cfg.lambda3 * L.dpa;
  return cache;
}

Gradients backward(const ForwardCache& cache, const ModelParams& params,
                   const NormalizedAdjacency& original,
                   const std::vector<NormalizedAdjacency>& augmented, const LabelSet& labels,
                   const GnnConfig& cfg) {
  const size_t S = cache.augmented.size();
  if (augmented.size() != S) throw InternalError("backward: adjacency/cache channel mismatch");
  const Index n = cache.original.probs.rows();
  const Index c = cache.original.probs.cols();
  const Index dp_dim = cache.original.z.cols();

  Index train_count = 0;
  for (Split s : labels.splits) train_count += s == Split::train ? 1 : 0;
  const double ce_scale = cfg.ce_sum ? 1.0 : 1.0 / static_cast<double>(train_count);

  Gradients g = Gradients::zeros_like(params);

  ChannelGrads orig;
  orig.dlogits = ce_logit_grad(cache.original.probs, labels, ce_scale);
  const bool want_dpa = cfg.lambda3 != 0.0 && S > 0;
  if (want_dpa) {
    orig.dprobs = Matrix::Zero(n, c);
    orig.dz = Matrix::Zero(n, dp_dim);
    orig.has_dz = true;
  }

  for (size_t s = 0; s < S; ++s) {
    const ChannelOutput& ch = cache.augmented[s];
    ChannelGrads cg;
    cg.dlogits = Matrix::Zero(n, c);
    if (cfg.lambda1 != 0.0)
      cg.dlogits = cfg.lambda1 / static_cast<double>(S) *
                   ce_logit_grad(ch.probs, labels, ce_scale);
    if (cfg.lambda2 != 0.0)
      cg.dprobs = cfg.lambda2 * 2.0 / static_cast<double>(S) * (ch.probs - cache.y_agg);
    if (want_dpa) {
      DpaGradients dg = dpa_prototype_gradients(cache.proto_orig, cache.proto_aug[s], cfg.tau);
      const double w = cfg.lambda3 / static_cast<double>(S);
      cg.dz = Matrix::Zero(n, dp_dim);
      cg.has_dz = true;
      if (cg.dprobs.size() == 0) cg.dprobs = Matrix::Zero(n, c);
      prototype_backward(cache.proto_aug[s], (w * dg.dp_prime).eval(), ch.z, cg.dz, cg.dprobs);
      prototype_backward(cache.proto_orig, (w * dg.dp).eval(), cache.original.z, orig.dz,
                         orig.dprobs);
    }
    channel_backward(ch, augmented[s], params, cg, g);
  }

  channel_backward(cache.original, original, params, orig, g);
  g.check_finite("backward");
  return g;
}

SgdState SgdState::zeros_like(const ModelParams& p) {
  SgdState s;
  s.v1 = Matrix::Zero(p.w1.rows(), p.w1.cols());
  s.v2 = Matrix::Zero(p.w2.rows(), p.w2.cols());
  s.v_proj = Matrix::Zero(p.w_proj.rows(), p.w_proj.cols());
  return s;
}

void sgd_step(ModelParams& params, const Gradients& g, SgdState& state, double lr, double momentum,
              double weight_decay) {
  auto step = [&](Matrix& w, const Matrix& grad, Matrix& v) {
    if (weight_decay != 0.0) {
      if (momentum != 0.0) {
        v = momentum * v + grad + weight_decay * w;
        w -= lr * v;
      } else {
        w -= lr * (grad + weight_decay * w);
      }
    } else if (momentum != 0.0) {
      v = momentum * v + grad;
      w -= lr * v;
    } else {
      w -= lr * grad;
    }
  };
  step(params.w1, g.w1, state.v1);
  step(params.w2, g.w2, state.v2);
  step(params.w_proj, g.w_proj, state.v_proj);
}

TrainResult train(const NormalizedAdjacency& original,
                  const std::vector<NormalizedAdjacency>& augmented, const Matrix& x,
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
    ForwardCache cache = forward_all(params, original, augmented, x, labels, cfg, seed, e, true);
    out.dpa_degenerate_seen = out.dpa_degenerate_seen || cache.dpa_degenerate;
    out.ce_clamped_total += cache.ce_clamped;
    if (!std::isfinite(cache.losses.total)) {
      out.diverged = true;
      break;
    }
    Gradients g = backward(cache, params, original, augmented, labels, cfg);
    sgd_step(params, g, mom, cfg.lr, cfg.momentum, cfg.weight_decay);

    Matrix probs = predict_probs(params, original, x);
    EpochMetrics em;
    em.epoch = e;
    em.losses = cache.losses;
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

Matrix predict_probs(const ModelParams& params, const NormalizedAdjacency& adj, const Matrix& x) {
  return gcn_forward(adj, x, params, 0.0, nullptr).probs;
}

double accuracy(const Matrix& probs, const LabelSet& labels, Split split) {
  if (probs.rows() != labels.size()) throw InputError("accuracy: probs rows != label count");
  Index hit = 0, total = 0;
  for (Index i = 0; i < probs.rows(); ++i) {
    if (labels.splits[static_cast<size_t>(i)] != split) continue;
    Index arg = 0;
    probs.row(i).maxCoeff(&arg);
    hit += static_cast<int>(arg) == labels.labels[static_cast<size_t>(i)] ? 1 : 0;
    ++total;
  }
  if (total == 0) throw InputError("accuracy: empty split");
  return static_cast<double>(hit) / static_cast<double>(total);
}

double evaluate(const ModelParams& params, const NormalizedAdjacency& adj, const Matrix& x,
                const LabelSet& labels, Split split) {
  return accuracy(predict_probs(params, adj, x), labels, split);
}

double evaluate_ensemble(const ModelParams& params, const std::vector<NormalizedAdjacency>& adjs,
                         const Matrix& x, const LabelSet& labels, Split split) {
  if (adjs.empty()) throw InputError("evaluate_ensemble: no channels");
  Matrix mean = predict_probs(params, adjs.front(), x);
  for (size_t i = 1; i < adjs.size(); ++i) mean += predict_probs(params, adjs[i], x);
  mean /= static_cast<double>(adjs.size());
  return accuracy(mean, labels, split);
}

}  // namespace coata
