// Copyright (c) 2026 rejsamp contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rejsamp/domain.hpp"
#include "rejsamp/dual.hpp"

namespace rejsamp {

// Thrown when a user density returns NaN.  A zero density must be signalled
// with -inf, never NaN.
class TargetError : public std::runtime_error {
 public:
  explicit TargetError(const std::string& what) : std::runtime_error(what) {}
};

// A log-density to sample from.  `eval` must be pure and may return -inf for
// zero-density points.  Gradients come from `gradient` when supplied, else
// from a dual-number evaluation of `eval_dual`.
struct LogTarget {
  using EvalFn = std::function<double(const std::vector<double>&)>;
  using DualFn = std::function<Dual(const std::vector<Dual>&)>;
  using GradFn = std::function<std::vector<double>(const std::vector<double>&)>;

  Domain domain;
  EvalFn eval;
  DualFn eval_dual;  // empty when provides_gradient
  GradFn gradient;   // empty unless provides_gradient
  bool provides_gradient = false;

  // Builds both evaluation paths from one templated callable.
  template <class Fn>
  static LogTarget from_generic(Domain domain, Fn fn) {
    LogTarget t;
    t.domain = std::move(domain);
    t.eval = [fn](const std::vector<double>& x) { return fn(x); };
    t.eval_dual = [fn](const std::vector<Dual>& x) { return fn(x); };
    return t;
  }
};

// log f(x): -inf outside the domain or at zero density; NaN is a hard error.
double log_density(const LogTarget& t, const std::vector<double>& x);

// grad log f(x).  Returns nullopt when any component is non-finite
// (gradient failure); callers treat the point as unusable.
std::optional<std::vector<double>> grad_log_density(const LogTarget& t,
                                                    const std::vector<double>& x);

// Evaluation front-end that owns the f-call budget.  Every value query and
// every combined value+gradient query counts as one target evaluation.
class TargetEvaluator {
 public:
  explicit TargetEvaluator(const LogTarget& t) : target_(&t) {}

  const LogTarget& target() const { return *target_; }
  const Domain& domain() const { return target_->domain; }
  std::int64_t eval_count() const { return count_; }

  double value(const std::vector<double>& x) {
    ++count_;
    return log_density(*target_, x);
  }

  struct ValueGrad {
    double value;
    std::vector<double> grad;
    bool grad_ok;
  };

  // One counted evaluation producing log f and its gradient (a dual pass, or
  // eval + user gradient when one is supplied).
  ValueGrad value_grad(const std::vector<double>& x);

 private:
  const LogTarget* target_;
  std::int64_t count_ = 0;
};

}  // namespace rejsamp
