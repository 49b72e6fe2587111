// Copyright (c) 2026 rejsamp contributors
// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "rejsamp/bench.hpp"
#include "rejsamp/stats.hpp"
#include "rejsamp/target.hpp"
#include "support/oracles.hpp"

using namespace rejsamp;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

double peak_logf(const BenchSpec& s, double x) {
  return log_density(make_target(s), std::vector<double>{x});
}
}  // namespace

TEST_SUITE("bench") {

TEST_CASE("peakiness closed-form values") {
  CHECK(peakiness_log(0.0, 1.0) == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(peakiness_log(1.0, 1.0) == doctest::Approx(-1.6931471805599454).epsilon(1e-15));
  CHECK(peakiness_log(20.0, 0.1) == doctest::Approx(-2.0062035960864986).epsilon(1e-14));
  CHECK(peakiness_log(5.0, 0.0) == -kInf);
  CHECK(peakiness_log(5.0, -0.3) == -kInf);
}

TEST_CASE("sinusoid peaks, zeros and factorization") {
  CHECK(sinusoid_log(1, {0.25}) == doctest::Approx(0.6931471805599453).epsilon(1e-14));
  CHECK(sinusoid_log(1, {0.5}) == -kInf);
  CHECK(sinusoid_log(3, {0.25, 0.25, 0.75}) ==
        doctest::Approx(2.0794415416798357).epsilon(1e-13));
  // Exact per-dimension factorization.
  const std::vector<double> x = {0.13, 0.61, 0.88, 0.42};
  double sum = 0.0;
  for (double xi : x) sum += sinusoid_log(1, {xi});
  CHECK(sinusoid_log(4, x) == sum);
  CHECK(sinusoid_log(2, {0.25, 1.5}) == -kInf);
}

TEST_CASE("clutter with r=0 collapses to the broad component") {
  for (double x : {-3.0, 0.0, 7.0}) {
    const double want =
        10.0 * (-0.5 * (x / 100.0) * (x / 100.0) - std::log(100.0 * std::sqrt(2.0 * M_PI)));
    CHECK(testsupport::rel_err(clutter_log(0.0, clutter_centers(), {x}), want) < 1e-13);
  }
}

TEST_CASE("clutter at x=-4 equals term-by-term summation") {
  const double x = -4.0;
  double want = 0.0;
  for (double c : clutter_centers()) {
    const double sig = std::exp(-0.5 * (x - c) * (x - c)) / std::sqrt(2.0 * M_PI);
    const double broad =
        std::exp(-0.5 * (x / 100.0) * (x / 100.0)) / (100.0 * std::sqrt(2.0 * M_PI));
    want += std::log(0.5 * sig + 0.5 * broad);
  }
  CHECK(testsupport::rel_err(clutter_log(0.5, clutter_centers(), {x}), want) < 1e-12);
}

TEST_CASE("clutter grid argmaxes sit inside the two bump regions") {
  const BenchSpec spec{Family::kClutter, 0.0, 1, 0.5};
  double best_left = -kInf, best_right = -kInf, arg_left = 0.0, arg_right = 0.0;
  for (double x = -10.0; x <= 10.0; x += 0.01) {
    const double v = peak_logf(spec, x);
    if (x < 0.0 && v > best_left) {
      best_left = v;
      arg_left = x;
    }
    if (x >= 0.0 && v > best_right) {
      best_right = v;
      arg_right = x;
    }
  }
  CHECK(arg_left >= -5.0);
  CHECK(arg_left <= -3.0);
  CHECK(arg_right >= 2.0);
  CHECK(arg_right <= 4.0);
  // Far separation: both regions tower over the midpoint.
  CHECK(best_left > peak_logf(spec, 0.0) + 5.0);
  CHECK(best_right > peak_logf(spec, 0.0) + 5.0);
}

TEST_CASE("gradients of all families match finite differences") {
  Rng rng(17);
  const BenchSpec peak{Family::kPeakiness, 7.0, 1, 0.5};
  const BenchSpec sinu{Family::kSinusoid, 0.0, 2, 0.5};
  const BenchSpec clut{Family::kClutter, 0.0, 2, 0.5};
  for (int rep = 0; rep < 8; ++rep) {
    {
      const LogTarget t = make_target(peak);
      const std::vector<double> x = {rng.uniform(0.05, 4.0)};
      const auto g = grad_log_density(t, x);
      const auto fd = testsupport::central_diff(
          [&](const std::vector<double>& p) { return log_density(t, p); }, x);
      CHECK(std::abs((*g)[0] - fd[0]) <= 1e-5 * std::max(1.0, std::abs(fd[0])));
    }
    {
      const LogTarget t = make_target(sinu);
      const std::vector<double> x = {rng.uniform(0.05, 0.45), rng.uniform(0.55, 0.95)};
      const auto g = grad_log_density(t, x);
      const auto fd = testsupport::central_diff(
          [&](const std::vector<double>& p) { return log_density(t, p); }, x);
      for (int i = 0; i < 2; ++i)
        CHECK(std::abs((*g)[i] - fd[i]) <= 1e-5 * std::max(1.0, std::abs(fd[i])));
    }
    {
      const LogTarget t = make_target(clut);
      const std::vector<double> x = {rng.uniform(-5.0, 4.0), rng.uniform(-5.0, 4.0)};
      const auto g = grad_log_density(t, x);
      const auto fd = testsupport::central_diff(
          [&](const std::vector<double>& p) { return log_density(t, p); }, x);
      for (int i = 0; i < 2; ++i)
        CHECK(std::abs((*g)[i] - fd[i]) <= 1e-5 * std::max(1.0, std::abs(fd[i])));
    }
  }
}

TEST_CASE("oracle self-consistency under KS") {
  const BenchSpec spec{Family::kSinusoid, 0.0, 1, 0.5};
  Rng rng(23);
  const auto x = oracle_sample(spec, 10000, rng);
  const auto y = oracle_sample(spec, 10000, rng);
  CHECK(ks_two_sample(x, y).p_value > 0.01);
}

TEST_CASE("peakiness oracle mean matches quadrature") {
  const BenchSpec spec{Family::kPeakiness, 1.0, 1, 0.5};
  const auto f = [&](double x) { return std::exp(peakiness_log(1.0, x)); };
  const double z = testsupport::integrate(f, 1e-12, 60.0);
  const double m1 = testsupport::integrate([&](double x) { return x * f(x); }, 1e-12, 60.0);
  const double mean_true = m1 / z;
  const double var_true =
      testsupport::integrate([&](double x) { return x * x * f(x); }, 1e-12, 60.0) / z -
      mean_true * mean_true;

  Rng rng(29);
  const auto pts = oracle_sample(spec, 100000, rng);
  double mean = 0.0;
  for (double p : pts) mean += p;
  mean /= static_cast<double>(pts.size());
  CHECK(std::abs(mean - mean_true) < 3.0 * std::sqrt(var_true / 1e5));
}

TEST_CASE("clutter oracle splits its mass between the two regions like quadrature") {
  const BenchSpec spec{Family::kClutter, 0.0, 1, 0.5};
  const auto f = [&](double x) {
    return std::exp(clutter_log(0.5, clutter_centers(), {x}) + 45.0);  // rescale for quadrature
  };
  const double mass_left = testsupport::integrate(f, -6.0, -2.0);
  const double mass_right = testsupport::integrate(f, 1.0, 5.0);
  const double frac_left_true = mass_left / (mass_left + mass_right);

  Rng rng(31);
  const auto pts = oracle_sample(spec, 100000, rng);
  std::size_t in_left = 0, in_right = 0;
  for (double p : pts) {
    if (p >= -6.0 && p <= -2.0) ++in_left;
    if (p >= 1.0 && p <= 5.0) ++in_right;
  }
  const double frac_left =
      static_cast<double>(in_left) / static_cast<double>(in_left + in_right);
  const double se = std::sqrt(frac_left_true * (1.0 - frac_left_true) / 1e5);
  CHECK(std::abs(frac_left - frac_left_true) < 3.0 * se);
  // Essentially no mass elsewhere.
  CHECK(in_left + in_right > 99990u);
}

TEST_CASE("unsupported oracle combinations raise") {
  Rng rng(1);
  CHECK_THROWS(oracle_sample({Family::kClutter, 0.0, 3, 0.5}, 10, rng));
  CHECK_THROWS(oracle_sample({Family::kSinusoid, 0.0, 9, 0.5}, 10, rng));
}

}  // TEST_SUITE
