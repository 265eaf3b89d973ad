#pragma once

#include "coata/graph.hpp"

namespace coata {

/// Residual feature propagation settings: number of steps h and the
/// fraction beta of the original features re-injected at every step.
struct TeaConfig {
  int h = 2;
  double beta = 0.3;

  void validate() const {
    if (h < 0) throw InputError("tea: h must be >= 0, got " + std::to_string(h));
    if (!(beta >= 0.0 && beta <= 1.0))
      throw InputError("tea: beta must lie in [0, 1], got " + format_double(beta));
  }
};

struct EnrichedFeatures {
  Matrix h_matrix;
  int steps_run = 0;
};

/// Runs X^(l) = (1-beta) * adj * X^(l-1) + beta * X for exactly cfg.h steps.
EnrichedFeatures propagate(const Matrix& x, const NormalizedAdjacency& adj, const TeaConfig& cfg);

/// Dense-solve fixed point beta * (I - (1-beta) * adj)^{-1} * X. Verification
/// oracle, not a production path; refuses n above the cap.
Matrix fixed_point(const Matrix& x, const NormalizedAdjacency& adj, double beta,
                   Index max_dense_dim = 2000);

/// Neighbor label-agreement schedule p_l = beta + (1-beta) * p_{l-1};
/// equals 1 - (1-beta)^l * (1 - p0).
double homophily_schedule(double p0, double beta, int l);

}  // namespace coata
