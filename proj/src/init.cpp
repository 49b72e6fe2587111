// Copyright (c) 2026 rejsamp contributors
// SPDX-License-Identifier: Apache-2.0
#include "rejsamp/init.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rejsamp/optim.hpp"

namespace rejsamp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double dist2(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

std::vector<double> sigma_floor_for(const Domain& domain, double scale) {
  std::vector<double> f(domain.dims());
  for (std::size_t i = 0; i < domain.dims(); ++i) {
    const bool finite = std::isfinite(domain.lower(i)) && std::isfinite(domain.upper(i));
    f[i] = scale * (finite ? domain.upper(i) - domain.lower(i) : 1.0);
  }
  return f;
}

// Joint accelerated descent over a set of points whose objective is a sum of
// independent per-point terms.  Points whose term goes non-finite are frozen
// in place (and stop consuming target evaluations).  Tracks the per-point
// values belonging to the best joint iterate.
struct PointSetOptimizer {
  // term(x_j) -> (value, grad); value == +inf marks the point unusable.
  using TermFn =
      std::function<double(std::size_t j, const std::vector<double>&, std::vector<double>&)>;

  std::vector<std::vector<double>> best_points;
  std::vector<double> best_values;  // per-point term values at the best iterate
  std::vector<bool> usable;

  void run(const TermFn& term, std::vector<std::vector<double>> start, int steps,
           double step_size, bool adapt, const Domain& domain) {
    const std::size_t m = start.size();
    const std::size_t d = domain.dims();
    usable.assign(m, true);
    std::vector<double> last_values(m, kInf);

    std::vector<double> x0(m * d);
    for (std::size_t j = 0; j < m; ++j) {
      domain.clamp_interior(start[j]);
      std::copy(start[j].begin(), start[j].end(), x0.begin() + j * d);
    }
    best_points = start;
    best_values.assign(m, kInf);
    double best_obj = kInf;

    std::vector<double> pt(d), pg(d);
    const ObjectiveFn objective = [&](const std::vector<double>& x, std::vector<double>& grad) {
      double total = 0.0;
      std::fill(grad.begin(), grad.end(), 0.0);
      for (std::size_t j = 0; j < m; ++j) {
        if (!usable[j]) continue;
        std::copy(x.begin() + j * d, x.begin() + (j + 1) * d, pt.begin());
        const double v = term(j, pt, pg);
        if (!std::isfinite(v)) {
          usable[j] = false;  // frozen from here on
          last_values[j] = kInf;
          continue;
        }
        last_values[j] = v;
        total += v;
        std::copy(pg.begin(), pg.end(), grad.begin() + j * d);
      }
      if (total < best_obj) {
        best_obj = total;
        for (std::size_t j = 0; j < m; ++j) {
          if (!usable[j]) continue;
          best_values[j] = last_values[j];
          std::copy(x.begin() + j * d, x.begin() + (j + 1) * d, best_points[j].begin());
        }
      }
      return total;
    };

    AccelOptions opts;
    opts.steps = steps;
    opts.step_size = step_size;
    opts.adapt_step = adapt;
    std::vector<double> block(d);
    opts.project = [&](std::vector<double>& v) {
      for (std::size_t j = 0; j < m; ++j) {
        std::copy(v.begin() + j * d, v.begin() + (j + 1) * d, block.begin());
        domain.clamp_interior(block);
        std::copy(block.begin(), block.end(), v.begin() + j * d);
      }
    };
    accel_minimize(objective, x0, opts);
  }
};

}  // namespace

const char* InitReport::modal_name(Modal m) {
  switch (m) {
    case Modal::kCompactShortcut:
      return "compact-shortcut";
    case Modal::kUnimodal:
      return "unimodal";
    case Modal::kMultimodal:
      return "multimodal";
  }
  return "?";
}

std::vector<std::vector<double>> k_farthest_select(const std::vector<std::vector<double>>& points,
                                                   double eps) {
  if (points.size() < 2) return points;
  // Farthest pair first.
  std::size_t bi = 0, bj = 1;
  double bd = -1.0;
  for (std::size_t i = 0; i < points.size(); ++i)
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      const double d = dist2(points[i], points[j]);
      if (d > bd) {
        bd = d;
        bi = i;
        bj = j;
      }
    }
  std::vector<std::size_t> sel;
  if (std::sqrt(bd) < eps) {
    sel = {bi};  // everything coincides
  } else {
    sel = {bi, bj};
    while (sel.size() < points.size()) {
      std::size_t best = 0;
      double best_min = -1.0;
      for (std::size_t i = 0; i < points.size(); ++i) {
        if (std::find(sel.begin(), sel.end(), i) != sel.end()) continue;
        double mind = kInf;
        for (std::size_t s : sel) mind = std::min(mind, dist2(points[i], points[s]));
        if (mind > best_min) {
          best_min = mind;
          best = i;
        }
      }
      if (std::sqrt(best_min) < eps) break;
      sel.push_back(best);
    }
  }
  std::vector<std::vector<double>> out;
  out.reserve(sel.size());
  for (std::size_t s : sel) out.push_back(points[s]);
  return out;
}

std::vector<double> estimate_spread_cov(TargetEvaluator& ev, const std::vector<double>& mode,
                                        double mode_logf, const InitOptions& opts, Rng& rng,
                                        bool* fallback) {
  const Domain& domain = ev.domain();
  const std::size_t d = domain.dims();
  const std::size_t m = 2 * d + 10;
  const double level = mode_logf - opts.spread_drop;
  if (fallback) *fallback = false;

  std::vector<std::vector<double>> start(m, mode);
  for (auto& s : start) {
    for (std::size_t i = 0; i < d; ++i) s[i] += rng.normal();
    domain.clamp_interior(s);
  }

  PointSetOptimizer opt;
  // Term: (logf(s) - level)^2, gradient 2 (logf - level) grad logf.
  opt.run(
      [&](std::size_t, const std::vector<double>& x, std::vector<double>& grad) -> double {
        const auto vg = ev.value_grad(x);
        if (vg.value == -kInf || !vg.grad_ok) return kInf;
        const double diff = vg.value - level;
        for (std::size_t i = 0; i < d; ++i) grad[i] = 2.0 * diff * vg.grad[i];
        return diff * diff;
      },
      start, opts.spread_steps, opts.accel_step_size, /*adapt=*/true, domain);

  // Survivors must actually sit near the level set; stragglers (stuck on a
  // bound, diverged) would drag the covariance toward zero or garbage.
  std::vector<std::size_t> survivors;
  for (std::size_t j = 0; j < m; ++j) {
    if (!opt.usable[j]) continue;
    if (!std::isfinite(opt.best_values[j])) continue;
    if (std::sqrt(opt.best_values[j]) > 2.5) continue;
    survivors.push_back(j);
  }

  const std::vector<double> floor = sigma_floor_for(domain, opts.variance_floor_scale);
  std::vector<double> cov(d, 1.0);
  if (survivors.size() < d + 2) {
    if (fallback) *fallback = true;
    return cov;  // identity
  }
  // Second moment about the mode: a one-sided level set (mode on a boundary)
  // must still produce spread, which centering on the points' own mean
  // would destroy.
  for (std::size_t i = 0; i < d; ++i) {
    double s = 0.0;
    for (std::size_t j : survivors) {
      const double diff = opt.best_points[j][i] - mode[i];
      s += diff * diff;
    }
    cov[i] = std::max(s / static_cast<double>(survivors.size()), floor[i] * floor[i]);
  }
  return cov;
}

std::pair<GmmProposal, InitReport> initialize(TargetEvaluator& ev, const InitOptions& opts,
                                              Rng& rng) {
  const Domain& domain = ev.domain();
  const std::size_t d = domain.dims();
  InitReport rep;
  const std::int64_t evals_at_entry = ev.eval_count();

  if (domain.compact()) {
    const std::vector<double> mu = domain.center();
    std::vector<double> ls(d);
    const std::vector<double> range = domain.range();
    for (std::size_t i = 0; i < d; ++i) ls[i] = std::log(range[i] / 3.0);
    rep.modal = InitReport::Modal::kCompactShortcut;
    rep.modes_found = {mu};
    rep.K = 1;
    rep.f_evals_used = 0;
    return {GmmProposal(domain, mu, ls, {0.0}), rep};
  }

  // Find any point of nonzero density.
  std::vector<double> x(d, 0.0);
  domain.clamp_interior(x);
  ++rep.zero_search_draws;
  while (ev.value(x) == -kInf) {
    if (rep.zero_search_draws >= opts.zero_search_max)
      throw InitFailure(
          "no nonzero-density point found in " + std::to_string(rep.zero_search_draws) +
          " draws; supply a domain that covers the target's support");
    for (std::size_t i = 0; i < d; ++i) x[i] = rng.normal();
    domain.clamp_interior(x);
    ++rep.zero_search_draws;
  }

  // Mode candidates: the found point plus d+3 unit-normal perturbations.
  const std::size_t m = d + 4;
  std::vector<std::vector<double>> start(m, x);
  for (std::size_t j = 0; j + 1 < m; ++j) {
    for (std::size_t i = 0; i < d; ++i) start[j][i] += rng.normal();
    domain.clamp_interior(start[j]);
  }

  PointSetOptimizer modes;
  modes.run(
      [&](std::size_t, const std::vector<double>& p, std::vector<double>& grad) -> double {
        const auto vg = ev.value_grad(p);
        if (vg.value == -kInf || !vg.grad_ok) return kInf;
        for (std::size_t i = 0; i < d; ++i) grad[i] = -vg.grad[i];
        return -vg.value;
      },
      start, opts.mode_steps, opts.accel_step_size, /*adapt=*/false, domain);

  std::vector<std::vector<double>> found;
  double best_mode_logf = -kInf;
  for (std::size_t j = 0; j < m; ++j) {
    if (!modes.usable[j] || !std::isfinite(modes.best_values[j])) continue;
    found.push_back(modes.best_points[j]);
    best_mode_logf = std::max(best_mode_logf, -modes.best_values[j]);
  }
  if (found.empty()) {
    // Every candidate failed; fall back to a unit ball at the nonzero point.
    rep.modal = InitReport::Modal::kUnimodal;
    rep.modes_found = {x};
    rep.K = 1;
    rep.f_evals_used = ev.eval_count() - evals_at_entry;
    rep.spread_fallback = true;
    return {GmmProposal(domain, x, std::vector<double>(d, 0.0), {0.0}), rep};
  }

  // Unimodality: maximum per-dimension variance of the converged candidates.
  std::vector<double> mean(d, 0.0);
  for (const auto& p : found)
    for (std::size_t i = 0; i < d; ++i) mean[i] += p[i];
  for (auto& v : mean) v /= static_cast<double>(found.size());
  double max_var = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    double s = 0.0;
    for (const auto& p : found) {
      const double diff = p[i] - mean[i];
      s += diff * diff;
    }
    max_var = std::max(max_var, s / static_cast<double>(found.size()));
  }

  const std::vector<double> floor = sigma_floor_for(domain, opts.variance_floor_scale);
  std::vector<std::vector<double>> selected;
  if (max_var >= opts.epsilon)
    selected = k_farthest_select(found, opts.epsilon);

  if (max_var < opts.epsilon || selected.size() < 2) {
    std::vector<double> mu = mean;
    domain.clamp_interior(mu);
    // The converged candidates all coincide (up to eps), so the best
    // candidate's cached value anchors the level set without a fresh call.
    const std::vector<double> cov =
        estimate_spread_cov(ev, mu, best_mode_logf, opts, rng, &rep.spread_fallback);
    std::vector<double> ls(d);
    for (std::size_t i = 0; i < d; ++i) ls[i] = 0.5 * std::log(cov[i]);
    rep.modal = InitReport::Modal::kUnimodal;
    rep.modes_found = {mu};
    rep.K = 1;
    rep.f_evals_used = ev.eval_count() - evals_at_entry;
    return {GmmProposal(domain, mu, ls, {0.0}), rep};
  }

  const std::size_t K = selected.size();
  double max_pair = 0.0;
  for (std::size_t i = 0; i < K; ++i)
    for (std::size_t j = i + 1; j < K; ++j)
      max_pair = std::max(max_pair, std::sqrt(dist2(selected[i], selected[j])));
  const double cov = max_pair / static_cast<double>(K);

  std::vector<double> mu(K * d), ls(K * d), logits(K, 0.0);
  for (std::size_t k = 0; k < K; ++k)
    for (std::size_t i = 0; i < d; ++i) {
      mu[k * d + i] = selected[k][i];
      const double sigma = std::max(std::sqrt(cov), floor[i]);
      ls[k * d + i] = std::log(sigma);
    }
  rep.modal = InitReport::Modal::kMultimodal;
  rep.modes_found = selected;
  rep.K = K;
  rep.f_evals_used = ev.eval_count() - evals_at_entry;
  return {GmmProposal(domain, mu, ls, logits), rep};
}

}  // namespace rejsamp
