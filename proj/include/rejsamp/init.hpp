// Copyright (c) 2026 rejsamp contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rejsamp/gmm.hpp"
#include "rejsamp/rng.hpp"
#include "rejsamp/target.hpp"

namespace rejsamp {

struct InitOptions {
  int mode_steps = 100;    // target evaluations per mode candidate
  int spread_steps = 100;  // target evaluations per spread point
  double accel_step_size = 0.05;
  double epsilon = 1e-3;  // unimodality test and k-farthest stopping
  int zero_search_max = 10000;
  double variance_floor_scale = 1e-4;
  double spread_drop = 5.0;  // spread points sit this many nats below the mode
};

struct InitReport {
  std::int64_t f_evals_used = 0;
  enum class Modal { kCompactShortcut, kUnimodal, kMultimodal } modal = Modal::kCompactShortcut;
  std::vector<std::vector<double>> modes_found;
  std::size_t K = 1;
  std::int64_t zero_search_draws = 0;
  bool spread_fallback = false;  // too few usable spread points, identity covariance

  static const char* modal_name(Modal m);
};

// Thrown when no nonzero-density point is found within the draw budget.
class InitFailure : public std::runtime_error {
 public:
  explicit InitFailure(const std::string& what) : std::runtime_error(what) {}
};

// Greedy max-min subset selection: start from the farthest pair, repeatedly
// add the point farthest from the selected set, stop when that distance
// drops below eps.  Points within eps of each other dedup to one.
std::vector<std::vector<double>> k_farthest_select(const std::vector<std::vector<double>>& points,
                                                   double eps);

// Diagonal covariance from points optimized onto the (mode - spread_drop)
// level set of log f.  Returns the per-dimension second moment of the
// surviving spread points about the mode (floored); identity when fewer than
// d+2 points survive.
std::vector<double> estimate_spread_cov(TargetEvaluator& ev, const std::vector<double>& mode,
                                        double mode_logf, const InitOptions& opts, Rng& rng,
                                        bool* fallback = nullptr);

// Builds the first proposal (compact shortcut / unimodal / multimodal).
std::pair<GmmProposal, InitReport> initialize(TargetEvaluator& ev, const InitOptions& opts,
                                              Rng& rng);

}  // namespace rejsamp
