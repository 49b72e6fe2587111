// Copyright (c) 2026 rejsamp contributors
// SPDX-License-Identifier: Apache-2.0
#include "rejsamp/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace rejsamp {

namespace {

constexpr double kPi = 3.14159265358979323846;

double ks_p_value(double d, std::size_t n1, std::size_t n2) {
  const double ne = static_cast<double>(n1) * static_cast<double>(n2) /
                    static_cast<double>(n1 + n2);
  return kolmogorov_sf(std::sqrt(ne) * d);
}

std::vector<std::size_t> subsample_indices(std::size_t n, std::size_t want, Rng& rng) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  if (want >= n) return idx;
  // Partial Fisher-Yates.
  for (std::size_t i = 0; i < want; ++i) {
    const std::size_t j = i + rng.index(n - i);
    std::swap(idx[i], idx[j]);
  }
  idx.resize(want);
  return idx;
}

}  // namespace

double kolmogorov_sf(double lambda) {
  if (lambda <= 0.0) return 1.0;
  if (lambda < 1.18) {
    // P(K <= x) = sqrt(2 pi)/x sum exp(-(2k-1)^2 pi^2 / (8x^2)); fast for
    // small x where the alternating series converges slowly.
    const double t = kPi * kPi / (8.0 * lambda * lambda);
    double cdf = 0.0;
    for (int k = 1; k <= 20; ++k) {
      const double term = std::exp(-static_cast<double>(2 * k - 1) * (2 * k - 1) * t);
      cdf += term;
      if (term < 1e-18) break;
    }
    cdf *= std::sqrt(2.0 * kPi) / lambda;
    return std::clamp(1.0 - cdf, 0.0, 1.0);
  }
  double sf = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * static_cast<double>(k) * k * lambda * lambda);
    sf += (k % 2 == 1) ? 2.0 * term : -2.0 * term;
    if (term < 1e-18) break;
  }
  return std::clamp(sf, 0.0, 1.0);
}

TestResult ks_two_sample(std::vector<double> x, std::vector<double> y) {
  if (x.size() < 25 || y.size() < 25)
    throw std::invalid_argument("ks_two_sample needs at least 25 samples per side");
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double n1 = static_cast<double>(x.size());
  const double n2 = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < x.size() || j < y.size()) {
    double v;
    if (i < x.size() && (j >= y.size() || x[i] <= y[j]))
      v = x[i];
    else
      v = y[j];
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / n1 - static_cast<double>(j) / n2));
  }
  TestResult r;
  r.statistic = d;
  r.p_value = ks_p_value(d, x.size(), y.size());
  r.method = "ks-asymptotic";
  r.n1 = x.size();
  r.n2 = y.size();
  return r;
}

TestResult ks_one_sample(std::vector<double> x, const std::function<double(double)>& cdf) {
  if (x.size() < 25) throw std::invalid_argument("ks_one_sample needs at least 25 samples");
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = cdf(x[i]);
    d = std::max(d, std::max(f - static_cast<double>(i) / n,
                             static_cast<double>(i + 1) / n - f));
  }
  TestResult r;
  r.statistic = d;
  r.p_value = kolmogorov_sf(std::sqrt(n) * d);
  r.method = "ks-asymptotic";
  r.n1 = x.size();
  r.n2 = 0;
  return r;
}

TestResult cramer_two_sample(const std::vector<double>& x, const std::vector<double>& y,
                             std::size_t d, int permutations, Rng& rng,
                             std::size_t subsample_cap) {
  if (d == 0 || x.size() % d != 0 || y.size() % d != 0)
    throw std::invalid_argument("cramer_two_sample: data shape mismatch");
  std::size_t n1 = x.size() / d;
  std::size_t n2 = y.size() / d;
  if (n1 < 50 || n2 < 50)
    throw std::invalid_argument("cramer_two_sample needs at least 50 samples per side");
  if (permutations < 200)
    throw std::invalid_argument("cramer_two_sample needs at least 200 permutations");

  const auto ix = subsample_indices(n1, subsample_cap, rng);
  const auto iy = subsample_indices(n2, subsample_cap, rng);
  n1 = ix.size();
  n2 = iy.size();
  const std::size_t N = n1 + n2;

  // Pooled coordinates; distance matrix in float to halve the footprint.
  std::vector<double> pool(N * d);
  for (std::size_t i = 0; i < n1; ++i)
    std::copy(x.begin() + ix[i] * d, x.begin() + (ix[i] + 1) * d, pool.begin() + i * d);
  for (std::size_t i = 0; i < n2; ++i)
    std::copy(y.begin() + iy[i] * d, y.begin() + (iy[i] + 1) * d,
              pool.begin() + (n1 + i) * d);

  std::vector<float> dist(N * N, 0.0f);
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = i + 1; j < N; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < d; ++k) {
        const double diff = pool[i * d + k] - pool[j * d + k];
        s += diff * diff;
      }
      const float v = static_cast<float>(std::sqrt(s));
      dist[i * N + j] = v;
      dist[j * N + i] = v;
    }

  double total_pairs_sum = 0.0;
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = i + 1; j < N; ++j) total_pairs_sum += dist[i * N + j];

  const double ne = static_cast<double>(n1) * static_cast<double>(n2) / static_cast<double>(N);
  const auto statistic = [&](const std::vector<std::size_t>& order) {
    // First n1 entries of `order` are the X side.
    double wxx = 0.0, wyy = 0.0;
    for (std::size_t a = 0; a < n1; ++a) {
      const std::size_t ia = order[a];
      const float* row = &dist[ia * N];
      for (std::size_t b = a + 1; b < n1; ++b) wxx += row[order[b]];
    }
    for (std::size_t a = n1; a < N; ++a) {
      const std::size_t ia = order[a];
      const float* row = &dist[ia * N];
      for (std::size_t b = a + 1; b < N; ++b) wyy += row[order[b]];
    }
    const double wxy = total_pairs_sum - wxx - wyy;
    const double mean_cross = wxy / (static_cast<double>(n1) * static_cast<double>(n2));
    const double mean_xx = 2.0 * wxx / (static_cast<double>(n1) * static_cast<double>(n1));
    const double mean_yy = 2.0 * wyy / (static_cast<double>(n2) * static_cast<double>(n2));
    return ne * (mean_cross - 0.5 * mean_xx - 0.5 * mean_yy);
  };

  std::vector<std::size_t> order(N);
  std::iota(order.begin(), order.end(), std::size_t{0});
  const double t_obs = statistic(order);

  int at_least = 0;
  for (int b = 0; b < permutations; ++b) {
    for (std::size_t i = 0; i + 1 < N; ++i) {
      const std::size_t j = i + rng.index(N - i);
      std::swap(order[i], order[j]);
    }
    if (statistic(order) >= t_obs) ++at_least;
  }

  TestResult r;
  r.statistic = t_obs;
  r.p_value = static_cast<double>(1 + at_least) / static_cast<double>(permutations + 1);
  r.method = "cramer-permutation";
  r.n1 = n1;
  r.n2 = n2;
  return r;
}

}  // namespace rejsamp
