// Copyright (c) 2026 rejsamp contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <random>

#include "rejsamp/normal.hpp"

namespace rejsamp {

// Seeded random stream.  Uniform and normal draws are derived from the raw
// mt19937_64 output with fixed arithmetic (no std::*_distribution), so the
// sequence is identical across standard libraries and platforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t raw() { return gen_(); }

  // Uniform on the open interval (0, 1); never returns an endpoint.
  double uniform() { return (static_cast<double>(gen_() >> 11) + 0.5) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal via the inverse CDF (deterministic, one draw consumed).
  double normal() { return norm_icdf(uniform()); }

  // Index in [0, n) from a single uniform draw.
  std::size_t index(std::size_t n) {
    const double u = uniform();
    std::size_t i = static_cast<std::size_t>(u * static_cast<double>(n));
    return i >= n ? n - 1 : i;
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace rejsamp
