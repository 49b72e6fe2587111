// Copyright (c) 2026 rejsamp contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "rejsamp/gmm.hpp"
#include "rejsamp/init.hpp"
#include "rejsamp/refine.hpp"
#include "rejsamp/target.hpp"

namespace rejsamp {

struct SamplerConfig {
  std::int64_t T = 10000;      // accepted samples to produce
  double n_base = 500.0;       // batch size base
  double c_low_inflate = 1.05; // per-batch inflation of the low-water mark
  double accept_weight = 10.0; // extra EM weight on accepted points
  double gmm_growth = 1.5;     // refit when |A| grew by this factor
  double gmm_k_cap_divisor = 15.0;  // K' = min(log2|A|, |A|/(d*divisor))
  int refine_steps = 800;
  std::vector<int> refine_checkpoints = {100, 200, 400, 800};
  double refine_lr = 0.1;
  std::uint64_t seed = 0;

  // Initialization budgets.
  int init_mode_steps = 100;
  int init_spread_steps = 100;
  double accel_step_size = 0.05;
  double init_epsilon = 1e-3;
  int zero_search_max = 10000;

  // Fitting.
  int em_max_iters = 100;
  double em_rel_tol = 1e-6;
  double variance_floor_scale = 1e-4;
  double weight_floor = 1e-6;

  // Guards / runtime.
  double max_feval_factor = 1e6;  // abort past factor * T target evaluations
  int threads = 1;                // worker threads inside refinement passes

  void validate() const;  // throws on non-positive constants
  std::string to_json() const;
  // Overrides fields present in the JSON object; unknown keys are an error.
  void apply_json_overrides(const std::string& text);
};

struct BatchRecord {
  std::int32_t epoch = 0;
  double batch_sup_log = 0.0;
  std::int64_t drawn = 0;
  std::int64_t accepted = 0;
};

struct EpochRecord {
  GmmProposal proposal;
  double final_c_hat_log = 0.0;
  std::vector<double> batch_sups_log;
};

struct SamplerState {
  explicit SamplerState(GmmProposal g) : proposal(std::move(g)) {
    epochs.push_back({proposal, 0.0, {}});
  }

  GmmProposal proposal;
  // Candidate cache (A and R interleaved in draw order), row-major points.
  std::vector<double> points;
  std::vector<double> logf;
  std::vector<double> logg_at_draw;
  std::vector<double> u;
  std::vector<std::int32_t> epoch_of;
  std::vector<std::uint8_t> accepted;
  std::vector<std::size_t> accepted_order;

  double c_hat_log = -std::numeric_limits<double>::infinity();
  double c_low_log = std::numeric_limits<double>::infinity();
  std::int64_t accepted_at_last_fit = 0;
  std::int32_t epoch_id = 0;
  bool refine_flag = false;
  std::vector<EpochRecord> epochs;
  std::vector<BatchRecord> batches;
  std::int64_t degenerate_warnings = 0;

  std::size_t draws() const { return logf.size(); }
  std::int64_t accepted_count() const { return static_cast<std::int64_t>(accepted_order.size()); }
};

struct AuditResult {
  std::vector<std::size_t> violations;  // cache indices of flagged accepted samples
  bool pass() const { return violations.empty(); }
};

struct RunReport {
  SamplerConfig config;
  std::int64_t f_evals = 0;
  std::int64_t accepted_total = 0;
  double acceptance_rate = 0.0;  // accepted_total / f_evals
  double wall_time_s = 0.0;
  InitReport init;
  std::vector<EpochRecord> epochs;
  AuditResult audit;
  std::int64_t degenerate_warnings = 0;
  bool aborted = false;
  std::string abort_reason;

  std::string to_json() const;
};

struct RunResult {
  std::vector<double> samples;  // first T accepted points, row-major
  std::size_t dims = 0;
  RunReport report;
};

// One batch: draw, compute the batch supremum, update the empirical supremum
// and the low-water mark, then accept with the post-update supremum.
void batch_step(SamplerState& st, TargetEvaluator& ev, const SamplerConfig& cfg, Rng& rng);

// Fit a candidate mixture when the refit trigger fires; returns nothing when
// the trigger is quiet or a usable fit is impossible.
std::optional<GmmProposal> maybe_refit_gmm(SamplerState& st, const SamplerConfig& cfg, Rng& rng);

// Re-checks every accepted sample against its epoch's final supremum and
// proposal snapshot.
AuditResult audit(const SamplerState& st);

// Full sampling run: initialize, loop batches with refit/refine, audit.
RunResult run(const LogTarget& target, const SamplerConfig& cfg);

}  // namespace rejsamp
