// Copyright (c) 2026 rejsamp contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "rejsamp/dual.hpp"
#include "rejsamp/rng.hpp"
#include "rejsamp/target.hpp"

namespace rejsamp {

enum class Family { kPeakiness, kSinusoid, kClutter };

const char* family_name(Family f);
Family family_from_name(const std::string& name);

// Benchmark target description: exponential-with-polynomial-decay on (0,inf)
// controlled by `a`, a separable multi-peak density on [0,1]^d, and a
// two-region mixture-of-bumps posterior on R^d mixed with a very broad
// background (weight 1-r).
struct BenchSpec {
  Family family = Family::kPeakiness;
  double a = 1.0;     // peakiness exponent
  std::size_t d = 1;  // dimensions (sinusoid/clutter)
  double r = 0.5;     // clutter signal weight

  std::string label() const;
};

Domain bench_domain(const BenchSpec& spec);
LogTarget make_target(const BenchSpec& spec);

// The ten clutter bump centers: five evenly spaced over [-5,-3], five over
// [2,4]; used for every coordinate in d > 1.
const std::vector<double>& clutter_centers();

// Unnormalized log densities (scalar forms).
double peakiness_log(double a, double x);
double sinusoid_log(std::size_t d, const std::vector<double>& x);
double clutter_log(double r, const std::vector<double>& centers, const std::vector<double>& x);

// Ground-truth sampler for distributional checks: grid inverse-CDF for 1-D
// targets, per-dimension inversion for the separable family, direct 2-D grid
// inversion for clutter d=2.  Grids are built once per spec and shared.
std::vector<double> oracle_sample(const BenchSpec& spec, std::size_t n, Rng& rng);

}  // namespace rejsamp
