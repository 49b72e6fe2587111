// Copyright (c) 2026 rejsamp contributors
// SPDX-License-Identifier: Apache-2.0
#include "rejsamp/refine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rejsamp/optim.hpp"
#include "rejsamp/parallel.hpp"

namespace rejsamp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Fixed reduction granularity: small enough to spread a ~20k-point cache
// over the pool, never dependent on the worker count.
constexpr std::size_t kChunk = 1024;

// Indices of cache entries that constrain the ratio (finite log f).
std::vector<std::size_t> usable_indices(const double* logf, std::size_t n) {
  std::vector<std::size_t> idx;
  idx.reserve(n);
  for (std::size_t i = 0; i < n; ++i)
    if (logf[i] != -kInf) idx.push_back(i);
  return idx;
}

struct LossGrad {
  double loss = kInf;
  bool finite = false;
};

// Shared two-pass evaluation.  Pass 1 fills alpha; pass 2 (optional)
// accumulates the parameter gradient.  Chunk results are combined in chunk
// order so the reduction is reproducible at any thread count.
LossGrad loss_and_grad(const GmmProposal& g, const double* points, const double* logf,
                       const std::vector<std::size_t>& idx, int threads,
                       std::vector<double>* alpha_buf, std::vector<double>* grad_out) {
  LossGrad out;
  const std::size_t m = idx.size();
  if (m == 0) return out;
  const std::size_t d = g.dims();
  std::vector<double>& alpha = *alpha_buf;
  alpha.resize(m);

  const std::size_t nchunks = chunk_count(m, kChunk);
  std::vector<double> chunk_max(nchunks, -kInf);
  std::vector<unsigned char> chunk_bad(nchunks, 0);
  for_chunks(m, kChunk, threads, [&](std::size_t c, std::size_t b, std::size_t e) {
    double mx = -kInf;
    bool bad = false;
    for (std::size_t j = b; j < e; ++j) {
      const std::size_t i = idx[j];
      const double lg = g.log_density(points + i * d);
      const double a = logf[i] - lg;
      alpha[j] = a;
      if (!std::isfinite(a)) bad = true;
      mx = std::max(mx, a);
    }
    chunk_max[c] = mx;
    chunk_bad[c] = bad ? 1 : 0;
  });
  double amax = -kInf;
  for (std::size_t c = 0; c < nchunks; ++c) {
    if (chunk_bad[c]) return out;  // g vanished on a cached point
    amax = std::max(amax, chunk_max[c]);
  }

  // Softmax statistics: S1 = sum e^{a-amax}, S2 = sum e^{a-amax} a.
  std::vector<double> s1(nchunks, 0.0), s2(nchunks, 0.0);
  for_chunks(m, kChunk, threads, [&](std::size_t c, std::size_t b, std::size_t e) {
    double l1 = 0.0, l2 = 0.0;
    for (std::size_t j = b; j < e; ++j) {
      const double w = std::exp(alpha[j] - amax);
      l1 += w;
      l2 += w * alpha[j];
    }
    s1[c] = l1;
    s2[c] = l2;
  });
  double S1 = 0.0, S2 = 0.0;
  for (std::size_t c = 0; c < nchunks; ++c) {
    S1 += s1[c];
    S2 += s2[c];
  }
  const double loss = S2 / S1;
  out.loss = loss;
  out.finite = std::isfinite(loss);
  if (!out.finite || grad_out == nullptr) return out;

  // dloss/da_j = p_j (1 + a_j - loss); dloss/dtheta = -sum_j b_j dlogg_j/dtheta.
  const std::size_t psize = g.flat_size();
  std::vector<double> chunk_grad(nchunks * psize, 0.0);
  for_chunks(m, kChunk, threads, [&](std::size_t c, std::size_t b, std::size_t e) {
    double* buf = chunk_grad.data() + c * psize;
    for (std::size_t j = b; j < e; ++j) {
      const double p = std::exp(alpha[j] - amax) / S1;
      const double coeff = p * (1.0 + alpha[j] - loss);
      if (coeff == 0.0) continue;
      g.log_density_accum_grad(points + idx[j] * d, -coeff, buf);
    }
  });
  grad_out->assign(psize, 0.0);
  for (std::size_t c = 0; c < nchunks; ++c)
    for (std::size_t q = 0; q < psize; ++q) (*grad_out)[q] += chunk_grad[c * psize + q];
  return out;
}

double max_ratio_indexed(const GmmProposal& g, const double* points, const double* logf,
                         const std::vector<std::size_t>& idx, int threads) {
  const std::size_t m = idx.size();
  if (m == 0) return -kInf;
  const std::size_t d = g.dims();
  const std::size_t nchunks = chunk_count(m, kChunk);
  std::vector<double> chunk_max(nchunks, -kInf);
  for_chunks(m, kChunk, threads, [&](std::size_t c, std::size_t b, std::size_t e) {
    double mx = -kInf;
    for (std::size_t j = b; j < e; ++j) {
      const std::size_t i = idx[j];
      const double lg = g.log_density(points + i * d);
      const double a = logf[i] - lg;
      mx = std::max(mx, std::isnan(a) ? kInf : a);
    }
    chunk_max[c] = mx;
  });
  double r = -kInf;
  for (double cm : chunk_max) r = std::max(r, cm);
  return r;
}

}  // namespace

double ratio_loss(const GmmProposal& g, const double* points, const double* logf, std::size_t n) {
  const auto idx = usable_indices(logf, n);
  std::vector<double> alpha;
  const LossGrad lg = loss_and_grad(g, points, logf, idx, 1, &alpha, nullptr);
  return lg.finite ? lg.loss : kInf;
}

double max_log_ratio(const GmmProposal& g, const double* points, const double* logf,
                     std::size_t n) {
  return max_ratio_indexed(g, points, logf, usable_indices(logf, n), 1);
}

double ratio_loss_grad(const GmmProposal& g, const double* points, const double* logf,
                       std::size_t n, std::vector<double>& grad) {
  const auto idx = usable_indices(logf, n);
  std::vector<double> alpha;
  const LossGrad lg = loss_and_grad(g, points, logf, idx, 1, &alpha, &grad);
  if (!lg.finite) {
    grad.assign(g.flat_size(), 0.0);
    return kInf;
  }
  return lg.loss;
}

RefineResult refine(const GmmProposal& g0, const double* points, const double* logf,
                    std::size_t n, double c_hat_log, const RefineOptions& opts) {
  const auto idx = usable_indices(logf, n);
  const int threads = opts.threads;

  auto reject = [&]() {
    RefineResult r{g0, max_ratio_indexed(g0, points, logf, idx, threads), false, 0};
    return r;
  };
  if (idx.empty()) return reject();

  std::vector<double> params = g0.flat_params();
  std::vector<double> alpha, grad;
  {
    const LossGrad step0 = loss_and_grad(g0, points, logf, idx, threads, &alpha, nullptr);
    if (!step0.finite) return reject();
  }

  AdaBeliefState ada(params.size(), opts.lr);
  double best_ratio = kInf;
  std::vector<double> best_params;
  int best_ckpt = 0;

  for (int step = 1; step <= opts.steps; ++step) {
    const GmmProposal g = GmmProposal::from_flat(g0.domain(), g0.components(), params);
    const LossGrad lg = loss_and_grad(g, points, logf, idx, threads, &alpha, &grad);
    if (!lg.finite) break;  // the optimizer walked g off the cache; keep checkpoints so far
    ada.step(params, grad);

    if (std::find(opts.checkpoints.begin(), opts.checkpoints.end(), step) !=
        opts.checkpoints.end()) {
      const GmmProposal gc = GmmProposal::from_flat(g0.domain(), g0.components(), params);
      const double r = max_ratio_indexed(gc, points, logf, idx, threads);
      if (r < best_ratio) {
        best_ratio = r;
        best_params = params;
        best_ckpt = step;
      }
    }
  }

  if (best_params.empty() || best_ratio > c_hat_log) return reject();
  GmmProposal best = GmmProposal::from_flat(g0.domain(), g0.components(), best_params);
  RefineResult res{std::move(best), 0.0, true, best_ckpt};
  res.achieved_log_ratio_max = max_ratio_indexed(res.proposal, points, logf, idx, threads);
  return res;
}

}  // namespace rejsamp
