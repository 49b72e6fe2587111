// Copyright (c) 2026 rejsamp contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <vector>

#include "rejsamp/gmm.hpp"

namespace rejsamp {

struct RefineOptions {
  int steps = 800;
  std::vector<int> checkpoints = {100, 200, 400, 800};
  double lr = 0.1;
  int threads = 1;
};

struct RefineResult {
  GmmProposal proposal;
  // max_i (logf_i - log g(x_i)) over the cache, recomputed exactly at return.
  double achieved_log_ratio_max = 0.0;
  bool improved = false;
  int checkpoint_chosen = 0;  // 0 = none (original proposal kept)
};

// Softmax-weighted maximum of the cached log-ratios a_i = logf_i - log g(x_i).
// Cached points with logf = -inf carry no ratio constraint and are skipped;
// a point where g vanishes while f does not makes the loss +inf.  Uses only
// the cache: no target evaluations ever happen here.
double ratio_loss(const GmmProposal& g, const double* points, const double* logf, std::size_t n);

// Exact supremum of the cached log-ratios for the same conventions.
double max_log_ratio(const GmmProposal& g, const double* points, const double* logf,
                     std::size_t n);

// ratio_loss together with its gradient with respect to the flat proposal
// parameters (grad must have g.flat_size() entries).
double ratio_loss_grad(const GmmProposal& g, const double* points, const double* logf,
                       std::size_t n, std::vector<double>& grad);

// Gradient refinement: AdaBelief on ratio_loss over the cache, with the true
// max log-ratio evaluated at the configured checkpoints and the best
// checkpoint returned.  improved is true when that best ratio is <= c_hat_log;
// otherwise the result carries g0 (and g0's exact ratio).
RefineResult refine(const GmmProposal& g0, const double* points, const double* logf,
                    std::size_t n, double c_hat_log, const RefineOptions& opts);

}  // namespace rejsamp
