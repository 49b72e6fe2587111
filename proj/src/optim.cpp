// Copyright (c) 2026 rejsamp contributors
// SPDX-License-Identifier: Apache-2.0
#include "rejsamp/optim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace rejsamp {

std::vector<double> softmax(const std::vector<double>& v) {
  if (v.empty()) throw std::invalid_argument("softmax of empty vector");
  const double m = *std::max_element(v.begin(), v.end());
  std::vector<double> out(v.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out[i] = std::exp(v[i] - m);
    sum += out[i];
  }
  for (auto& o : out) o /= sum;
  return out;
}

double softmax_weighted_max(const std::vector<double>& a) {
  const std::vector<double> p = softmax(a);
  double r = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) r += p[i] * a[i];
  return r;
}

void AdaBeliefState::step(std::vector<double>& params, const std::vector<double>& grad) {
  for (double g : grad) {
    if (!std::isfinite(g)) {
      ++skipped;
      return;
    }
  }
  ++t;
  const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(t));
  const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(t));
  for (std::size_t i = 0; i < params.size(); ++i) {
    m[i] = beta1 * m[i] + (1.0 - beta1) * grad[i];
    const double diff = grad[i] - m[i];
    s[i] = beta2 * s[i] + (1.0 - beta2) * diff * diff + eps;
    const double mhat = m[i] / bc1;
    const double shat = s[i] / bc2;
    params[i] -= lr * mhat / (std::sqrt(shat) + eps);
  }
}

AccelResult accel_minimize(const ObjectiveFn& objective, std::vector<double> x0,
                           const AccelOptions& opts) {
  AccelResult res;
  const std::size_t n = x0.size();
  const auto project = [&](std::vector<double>& v) {
    if (opts.project)
      opts.project(v);
    else if (opts.domain)
      opts.domain->clamp_interior(v);
  };
  project(x0);

  std::vector<double> grad(n, 0.0);
  std::vector<double> y = x0;
  std::vector<double> x_prev = x0;

  double best_obj = std::numeric_limits<double>::infinity();
  std::vector<double> best = x0;
  bool any_finite = false;

  double step = opts.step_size;
  double tk = 1.0;
  double prev_obj = std::numeric_limits<double>::infinity();

  for (int it = 0; it < opts.steps; ++it) {
    const double fy = objective(y, grad);
    ++res.evals;
    bool grad_ok = true;
    for (double g : grad) grad_ok = grad_ok && std::isfinite(g);
    const bool value_ok = std::isfinite(fy);

    if (value_ok) {
      any_finite = true;
      if (fy < best_obj) {
        best_obj = fy;
        best = y;
      }
    }

    if (!value_ok || !grad_ok || fy > prev_obj) {
      // Adaptive restart: kill the momentum at the best point seen; in
      // adaptive mode also back the step off.
      if (opts.adapt_step) step = std::max(step * 0.5, opts.step_size * 1e-8);
      y = best;
      x_prev = best;
      tk = 1.0;
      prev_obj = best_obj;
      if (!value_ok || !grad_ok) continue;
      // Re-evaluating at `best` would cost budget; take a plain descent step
      // from it next iteration instead.
      continue;
    }
    prev_obj = fy;
    if (opts.adapt_step) step = std::min(step * 1.1, opts.step_size * 10.0);

    std::vector<double> x_new(n);
    for (std::size_t i = 0; i < n; ++i) x_new[i] = y[i] - step * grad[i];
    project(x_new);

    const double tk_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * tk * tk));
    const double mom = (tk - 1.0) / tk_next;
    for (std::size_t i = 0; i < n; ++i) y[i] = x_new[i] + mom * (x_new[i] - x_prev[i]);
    project(y);
    x_prev = std::move(x_new);
    tk = tk_next;
  }

  if (!any_finite) {
    res.point = x0;
    res.objective = std::numeric_limits<double>::quiet_NaN();
    res.failed = true;
    return res;
  }
  res.point = std::move(best);
  res.objective = best_obj;
  return res;
}

}  // namespace rejsamp
