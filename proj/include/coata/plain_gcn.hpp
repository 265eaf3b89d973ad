#pragma once

#include "coata/gnn.hpp"

namespace coata {

/// Single-channel cross-entropy GCN trainer, assembled independently of the
/// multi-channel path so the two can be compared epoch by epoch. It shares
/// only the low-level primitives (parameter init, dropout masks, softmax,
/// SGD step) and replays the same RNG streams: Rng(seed) for init, then
/// Rng::fork(seed, epoch, 0) for the dropout masks.
TrainResult train_plain_gcn(const NormalizedAdjacency& adj, const Matrix& x,
                            const LabelSet& labels, const GnnConfig& cfg, std::uint64_t seed);

}  // namespace coata
