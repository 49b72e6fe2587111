// Copyright (c) 2026 rejsamp contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "rejsamp/domain.hpp"

namespace rejsamp {

// Shift-stabilized softmax; entries of the result sum to 1.
std::vector<double> softmax(const std::vector<double>& v);

// <softmax(a), a>: a smooth surrogate for max(a), bounded between the mean
// and the max of a.
double softmax_weighted_max(const std::vector<double>& a);

// AdaBelief optimizer over a flat parameter vector.
struct AdaBeliefState {
  double lr = 0.1;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-16;
  std::int64_t t = 0;
  std::int64_t skipped = 0;
  std::vector<double> m;
  std::vector<double> s;

  AdaBeliefState(std::size_t n, double learning_rate)
      : lr(learning_rate), m(n, 0.0), s(n, 0.0) {}

  // In-place update of params; a non-finite gradient skips the step.
  void step(std::vector<double>& params, const std::vector<double>& grad);
};

// Objective callback: returns the value at x and fills grad (same size as x).
using ObjectiveFn = std::function<double(const std::vector<double>&, std::vector<double>&)>;

struct AccelOptions {
  int steps = 100;          // total objective evaluations
  double step_size = 0.05;  // gradient step
  bool adapt_step = false;  // halve on increase / grow on decrease, with momentum restart
  const Domain* domain = nullptr;  // iterates clamped into the interior when given
  // Custom projection applied to every iterate (overrides `domain` clamping);
  // used when the optimization variable stacks several domain points.
  std::function<void(std::vector<double>&)> project;
};

struct AccelResult {
  std::vector<double> point;  // best (lowest objective) evaluated iterate
  double objective = 0.0;
  bool failed = false;  // every evaluation was non-finite
  int evals = 0;
};

// Nesterov/FISTA accelerated gradient descent with the t_k momentum sequence
// t_{k+1} = (1 + sqrt(1 + 4 t_k^2)) / 2.
AccelResult accel_minimize(const ObjectiveFn& objective, std::vector<double> x0,
                           const AccelOptions& opts);

}  // namespace rejsamp
