// Copyright (c) 2026 rejsamp contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rejsamp/domain.hpp"
#include "rejsamp/rng.hpp"

namespace rejsamp {

// K-component Gaussian mixture with diagonal covariance, truncated to the
// domain.  The evaluated log-density includes the per-component truncation
// mass, so it is exactly the density of the points sample() produces.
//
// Parameters live in unconstrained coordinates: means, log standard
// deviations, and weight logits (weights are their softmax).  The flat
// parameter vector is [means (K*d) | log_sigmas (K*d) | logits (K)].
class GmmProposal {
 public:
  GmmProposal(Domain domain, std::vector<double> means, std::vector<double> log_sigmas,
              std::vector<double> weight_logits);

  static GmmProposal from_flat(Domain domain, std::size_t K, const std::vector<double>& flat);

  std::size_t components() const { return K_; }
  std::size_t dims() const { return d_; }
  const Domain& domain() const { return domain_; }

  double mean(std::size_t k, std::size_t i) const { return means_[k * d_ + i]; }
  double sigma(std::size_t k, std::size_t i) const { return sigma_[k * d_ + i]; }
  double weight(std::size_t k) const { return w_[k]; }
  // log of the per-component truncation mass (product over dimensions).
  double log_trunc_mass(std::size_t k) const;

  std::vector<double> flat_params() const;
  std::size_t flat_size() const { return 2 * K_ * d_ + K_; }

  // log g(x); -inf outside the domain.
  double log_density(const std::vector<double>& x) const;
  double log_density(const double* x) const;

  // Gradient of log g(x) with respect to the flat parameter vector.
  std::vector<double> param_grad(const std::vector<double>& x) const;

  // Fused evaluation for the refinement loop: returns log g(x) and, when
  // grad_accum is non-null, adds coeff * d(log g)/d(params) into it.
  double log_density_accum_grad(const double* x, double coeff, double* grad_accum) const;

  // Draws m points; each point consumes 1 + d uniforms from rng.  Points lie
  // strictly inside the domain.  A component dimension whose truncation mass
  // underflowed is drawn from a sliver next to the nearest in-domain bound
  // and counted in *degenerate_warnings.
  std::vector<double> sample(Rng& rng, std::size_t m, std::int64_t* degenerate_warnings = nullptr) const;
  void sample_into(Rng& rng, std::size_t m, double* out, std::int64_t* degenerate_warnings = nullptr) const;

  std::string to_json() const;
  static GmmProposal from_json(const std::string& text);

 private:
  void build_caches();

  Domain domain_;
  std::size_t K_ = 0;
  std::size_t d_ = 0;
  std::vector<double> means_;          // K*d
  std::vector<double> log_sigmas_;     // K*d
  std::vector<double> weight_logits_;  // K

  // Derived, rebuilt whenever parameters are set.
  std::vector<double> sigma_;      // K*d
  std::vector<double> inv_sigma_;  // K*d
  std::vector<double> w_;          // K
  std::vector<double> log_w_;      // K
  std::vector<double> logz_;       // K*d, per-dimension truncation log-mass
  std::vector<double> base_;       // K: log w - sum(log sigma + logZ) - d/2 log(2pi)
  std::vector<double> tgrad_mu_;   // K*d: d(logZ)/d(mu)
  std::vector<double> tgrad_ls_;   // K*d: d(logZ)/d(log sigma)
};

struct EmOptions {
  std::size_t K = 1;
  int max_iters = 100;
  double rel_tol = 1e-6;
  double variance_floor_scale = 1e-4;  // sigma floor = scale * (range or 1)
  double weight_floor = 1e-6;
};

// Weighted EM fit with k-means++ seeding (seeding probabilities use the data
// weights).  Data is row-major n x d.  The weighted log-likelihood of the
// untruncated mixture is non-decreasing across iterations; pass ll_history
// to observe it.
GmmProposal gmm_fit_em(const Domain& domain, const double* data, const double* weights,
                       std::size_t n, std::size_t d, const EmOptions& opts, Rng& rng,
                       std::vector<double>* ll_history = nullptr);

GmmProposal gmm_fit_em(const Domain& domain, const std::vector<double>& data,
                       const std::vector<double>& weights, std::size_t d, const EmOptions& opts,
                       Rng& rng, std::vector<double>* ll_history = nullptr);

}  // namespace rejsamp
