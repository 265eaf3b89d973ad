#pragma once

#include "coata/graph.hpp"
#include "coata/rng.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace coata {

struct GnnConfig {
  Index hidden_dim = 64;
  Index proj_dim = 32;
  double dropout = 0.5;
  double lr = 0.01;
  double momentum = 0.9;
  double weight_decay = 5e-4;
  int epochs = 200;
  double lambda1 = 1.0;
  double lambda2 = 0.5;
  double lambda3 = 0.1;
  double tau = 0.5;
  /// Cross-entropy reduction: mean over labeled nodes by default, plain sum
  /// when set. Recorded in run metadata.
  bool ce_sum = false;
  /// Minimum confidence for an unlabeled node to vote into a prototype.
  double t_min = 0.0;
  /// Optional temperature sharpening of the aggregated pseudo-label.
  bool sharpen = false;
  double sharpen_temp = 0.5;
  /// Forces dropout off so reruns are bit-identical.
  bool deterministic = false;

  void validate() const;
};

/// Two GCN layers plus a linear projection head, shared by every channel.
struct ModelParams {
  Matrix w1;      // in_dim x hidden
  Matrix w2;      // hidden x classes
  Matrix w_proj;  // hidden x proj

  /// Uniform Glorot-style init; draw order w1, w2, w_proj, row-major.
  static ModelParams init(Index in_dim, Index hidden_dim, Index num_classes, Index proj_dim,
                          Rng& rng);
  void check_finite(const std::string& where) const;
};

struct Gradients {
  Matrix w1, w2, w_proj;
  static Gradients zeros_like(const ModelParams& p);
  void check_finite(const std::string& where) const;
};

/// One channel's forward pass with everything backward needs. h_mask is the
/// hidden-layer dropout mask (already scaled by 1/keep), empty when off.
struct ChannelOutput {
  Matrix a1;      // adj * (masked) input
  Matrix s1;      // a1 * w1, pre-activation
  Matrix hidden;  // relu(s1)
  Matrix a2;      // adj * (masked) hidden
  Matrix logits;  // a2 * w2
  Matrix probs;   // row softmax of logits
  Matrix z;       // hidden * w_proj (projection reads the pre-dropout hidden)
  Matrix h_mask;
};

/// hidden = ReLU(adj X W1), logits = adj hidden W2, z = hidden Wproj.
/// dropout > 0 needs an rng; pass nullptr (or 0) for evaluation.
ChannelOutput gcn_forward(const NormalizedAdjacency& adj, const Matrix& x,
                          const ModelParams& params, double dropout, Rng* rng);

Matrix row_softmax(const Matrix& logits);

/// Inverted-dropout mask: entries are 1/(1-p) with probability 1-p, else 0,
/// drawn row-major. Exposed so alternative trainers replay identical masks.
Matrix dropout_mask(Index rows, Index cols, double p, Rng& rng);

/// -mean (or -sum) of log probs[i][y_i] over train nodes. Probabilities are
/// clamped at 1e-12; *clamped counts how many hits the clamp took.
double loss_ce(const Matrix& probs, const LabelSet& labels, bool sum_mode, int* clamped = nullptr);

/// (1/S) sum_s ||y_agg - probs_s||_F^2 with y_agg held constant.
double loss_consistency(const std::vector<const Matrix*>& aug_probs, const Matrix& y_agg);

/// Confidence-weighted class centroids of the projected embeddings. A node
/// counts as labeled when it sits in the train split (class = its label,
/// t = 1); other nodes vote for argmax probs with t = max probs.
struct Prototypes {
  Matrix p;                 // classes x proj_dim
  Vector counts;            // per-class sum of t
  std::vector<char> valid;  // false when no node voted

  // Backward caches: per-node assignment, confidence, and whether t came
  // from probs (gradient flows into the prob matrix there).
  std::vector<int> assigned;
  Vector t;
  std::vector<char> t_from_probs;

  int valid_count() const;
};

Prototypes allocate_prototypes(const Matrix& z, const Matrix& probs, const LabelSet& labels,
                               double t_min = 0.0);

/// Symmetric InfoNCE-style alignment over mutually valid classes with
/// f(u,v) = exp(cos(u,v)/tau). Returns 0 (and sets *degenerate) when fewer
/// than two classes are valid on both sides. Zero-norm rows score cos = 0.
double loss_dpa(const Prototypes& a, const Prototypes& b, double tau, bool* degenerate = nullptr);

/// d loss_dpa / d p and d p' as classes x proj_dim matrices (zero rows for
/// classes outside the mutually valid set). Also the descent direction used
/// by the alignment property check.
struct DpaGradients {
  Matrix dp;
  Matrix dp_prime;
};
DpaGradients dpa_prototype_gradients(const Prototypes& a, const Prototypes& b, double tau);

struct LossBreakdown {
  double ce = 0.0;
  double ce_aug = 0.0;
  double co = 0.0;
  double dpa = 0.0;
  double total = 0.0;
  double lambda1 = 0.0, lambda2 = 0.0, lambda3 = 0.0;
};

/// Everything forward_all computed, kept alive for backward().
struct ForwardCache {
  ChannelOutput original;
  std::vector<ChannelOutput> augmented;
  Matrix y_agg;  // detached mean of all S+1 prob matrices
  Prototypes proto_orig;
  std::vector<Prototypes> proto_aug;
  LossBreakdown losses;
  int ce_clamped = 0;
  bool dpa_degenerate = false;
};

/// Runs the original channel plus S augmented channels with shared params.
/// Dropout streams are forked per (seed, epoch, channel index) so adding or
/// removing augmented channels never shifts the original channel's masks.
/// training=false (or cfg.deterministic) disables dropout.
///
/// y_agg is a constant target: backward never differentiates through it.
/// frozen_y_agg substitutes a caller-held target for the recomputed mean,
/// which is what lets finite differences probe the same function the
/// analytic gradient describes.
ForwardCache forward_all(const ModelParams& params, const NormalizedAdjacency& original,
                         const std::vector<NormalizedAdjacency>& augmented, const Matrix& x,
                         const LabelSet& labels, const GnnConfig& cfg, std::uint64_t seed,
                         int epoch, bool training, const Matrix* frozen_y_agg = nullptr);

/// Analytic gradient of losses.total for every parameter, including the
/// paths through prototypes (weighted means, confidences, cosines) and the
/// softmax; y_agg contributes nothing by construction. Components whose
/// lambda is zero are skipped entirely.
Gradients backward(const ForwardCache& cache, const ModelParams& params,
                   const NormalizedAdjacency& original,
                   const std::vector<NormalizedAdjacency>& augmented, const LabelSet& labels,
                   const GnnConfig& cfg);

struct SgdState {
  Matrix v1, v2, v_proj;
  static SgdState zeros_like(const ModelParams& p);
};

/// v = momentum*v + (g + weight_decay*param); param -= lr*v.
void sgd_step(ModelParams& params, const Gradients& g, SgdState& state, double lr, double momentum,
              double weight_decay);

struct EpochMetrics {
  int epoch = 0;
  LossBreakdown losses;  // from the training-mode forward entering the epoch
  double train_acc = 0.0;
  double val_acc = 0.0;  // evaluated after the parameter update
};

struct TrainResult {
  ModelParams params;  // from the best-val epoch (ties -> earlier)
  int best_epoch = -1;
  double best_val_acc = 0.0;
  std::vector<EpochMetrics> history;
  bool diverged = false;
  bool dpa_degenerate_seen = false;
  int ce_clamped_total = 0;
};

/// Full-batch descent for cfg.epochs epochs. Parameter init consumes Rng(seed)
/// first; per-epoch dropout uses independent forked streams. On non-finite
/// loss the loop aborts, returning the history so far with diverged=true.
TrainResult train(const NormalizedAdjacency& original,
                  const std::vector<NormalizedAdjacency>& augmented, const Matrix& x,
                  const LabelSet& labels, const GnnConfig& cfg, std::uint64_t seed);

/// Dropout-free original-channel probabilities.
Matrix predict_probs(const ModelParams& params, const NormalizedAdjacency& adj, const Matrix& x);

/// Fraction of split nodes whose argmax matches the label.
double accuracy(const Matrix& probs, const LabelSet& labels, Split split);

/// Original-channel evaluation (the default test-time prediction).
double evaluate(const ModelParams& params, const NormalizedAdjacency& adj, const Matrix& x,
                const LabelSet& labels, Split split);

/// Mean of per-channel probabilities before the argmax; adjs must contain
/// the original adjacency first.
double evaluate_ensemble(const ModelParams& params, const std::vector<NormalizedAdjacency>& adjs,
                         const Matrix& x, const LabelSet& labels, Split split);

}  // namespace coata
