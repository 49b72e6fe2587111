// Copyright (c) 2026 rejsamp contributors
// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "rejsamp/bench.hpp"
#include "rejsamp/rng.hpp"
#include "rejsamp/stats.hpp"
#include "support/oracles.hpp"

using namespace rejsamp;

TEST_SUITE("stats") {

TEST_CASE("identical samples give D=0, p=1") {
  Rng rng(1);
  std::vector<double> x(200);
  for (auto& v : x) v = rng.normal();
  const auto r = ks_two_sample(x, x);
  CHECK(r.statistic == 0.0);
  CHECK(r.p_value == 1.0);
}

TEST_CASE("disjoint constant samples give D=1") {
  const std::vector<double> x(1000, 0.0);
  const std::vector<double> y(1000, 1.0);
  const auto r = ks_two_sample(x, y);
  CHECK(r.statistic == 1.0);
  CHECK(r.p_value < 1e-12);
}

TEST_CASE("ks statistic equals the brute-force double loop") {
  Rng rng(2);
  for (int rep = 0; rep < 5; ++rep) {
    std::vector<double> x(120), y(90);
    for (auto& v : x) v = rng.normal();
    for (auto& v : y) v = rng.normal() * 1.3 + 0.2;
    if (rep == 3) {  // inject ties
      for (int i = 0; i < 30; ++i) y[i] = x[i];
    }
    const auto r = ks_two_sample(x, y);
    CHECK(std::abs(r.statistic - testsupport::ks_stat_bruteforce(x, y)) < 1e-12);
  }
}

TEST_CASE("ks p-values are self-consistent under the null") {
  const BenchSpec spec{Family::kSinusoid, 0.0, 1, 0.5};
  Rng rng(3);
  int pass = 0;
  for (int rep = 0; rep < 100; ++rep) {
    const auto x = oracle_sample(spec, 10000, rng);
    const auto y = oracle_sample(spec, 10000, rng);
    if (ks_two_sample(x, y).p_value > 0.01) ++pass;
  }
  CHECK(pass >= 99);
}

TEST_CASE("ks rejects a rough size floor") {
  CHECK_THROWS(ks_two_sample(std::vector<double>(10, 0.0), std::vector<double>(100, 0.0)));
}

TEST_CASE("cramer of a sample against itself is zero with p=1") {
  Rng rng(4);
  std::vector<double> x(120 * 3);
  for (auto& v : x) v = rng.normal();
  Rng trng(5);
  const auto r = cramer_two_sample(x, x, 3, 200, trng);
  CHECK(std::abs(r.statistic) < 1e-9);
  CHECK(r.p_value == 1.0);
}

TEST_CASE("cramer flags a gross shift at the resolution floor") {
  const BenchSpec spec{Family::kSinusoid, 0.0, 3, 0.5};
  Rng rng(6);
  const auto x = oracle_sample(spec, 200, rng);
  std::vector<double> y = x;
  for (auto& v : y) v += 10.0;
  Rng trng(7);
  const auto r = cramer_two_sample(x, y, 3, 200, trng);
  CHECK(r.p_value == doctest::Approx(1.0 / 201.0));
}

TEST_CASE("cramer p-values are self-consistent under the null") {
  const BenchSpec spec{Family::kSinusoid, 0.0, 3, 0.5};
  Rng rng(8);
  int pass = 0;
  for (int rep = 0; rep < 100; ++rep) {
    const auto x = oracle_sample(spec, 200, rng);
    const auto y = oracle_sample(spec, 200, rng);
    Rng trng(1000 + static_cast<std::uint64_t>(rep));
    if (cramer_two_sample(x, y, 3, 200, trng).p_value > 0.01) ++pass;
  }
  CHECK(pass >= 95);
}

TEST_CASE("cramer statistic is symmetric and permutation invariant") {
  Rng rng(9);
  std::vector<double> x(80 * 2), y(60 * 2);
  for (auto& v : x) v = rng.normal();
  for (auto& v : y) v = rng.normal() + 0.3;

  Rng r1(11), r2(11);
  const double txy = cramer_two_sample(x, y, 2, 200, r1).statistic;
  const double tyx = cramer_two_sample(y, x, 2, 200, r2).statistic;
  CHECK(txy == doctest::Approx(tyx).epsilon(1e-9));

  // Shuffle rows within x; the statistic must not move.
  std::vector<double> xs = x;
  Rng shuffle_rng(12);
  for (std::size_t i = 0; i + 1 < xs.size() / 2; ++i) {
    const std::size_t j = i + shuffle_rng.index(xs.size() / 2 - i);
    for (std::size_t k = 0; k < 2; ++k) std::swap(xs[2 * i + k], xs[2 * j + k]);
  }
  Rng r3(11);
  const double tshuf = cramer_two_sample(xs, y, 2, 200, r3).statistic;
  CHECK(txy == doctest::Approx(tshuf).epsilon(1e-9));
}

TEST_CASE("cramer is deterministic for a fixed seed") {
  Rng rng(13);
  std::vector<double> x(100), y(100);
  for (auto& v : x) v = rng.normal();
  for (auto& v : y) v = rng.normal();
  Rng a(77), b(77);
  const auto ra = cramer_two_sample(x, y, 1, 300, a);
  const auto rb = cramer_two_sample(x, y, 1, 300, b);
  CHECK(ra.statistic == rb.statistic);
  CHECK(ra.p_value == rb.p_value);
}

}  // TEST_SUITE
