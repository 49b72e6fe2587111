// Copyright (c) 2026 rejsamp contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "rejsamp/rng.hpp"

namespace rejsamp {

struct TestResult {
  double statistic = 0.0;
  double p_value = 1.0;
  std::string method;
  std::size_t n1 = 0;
  std::size_t n2 = 0;
};

// Survival function of the Kolmogorov distribution, P(K > lambda).
double kolmogorov_sf(double lambda);

// Two-sample Kolmogorov-Smirnov test with the asymptotic p-value at
// effective size n1*n2/(n1+n2).  Ties are handled by stepping both ECDFs
// past a value before comparing.
TestResult ks_two_sample(std::vector<double> x, std::vector<double> y);

// One-sample variant against an analytic CDF (the proposal sampler checks).
TestResult ks_one_sample(std::vector<double> x, const std::function<double(double)>& cdf);

// Two-sample Cramer test (Baringhaus-Franz energy form, Euclidean distance)
// with a permutation p-value.  Inputs are row-major n x d.  Sides larger
// than subsample_cap are subsampled (seeded by rng) before the O(n^2)
// distance matrix is formed.
TestResult cramer_two_sample(const std::vector<double>& x, const std::vector<double>& y,
                             std::size_t d, int permutations, Rng& rng,
                             std::size_t subsample_cap = 5000);

}  // namespace rejsamp
