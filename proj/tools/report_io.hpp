// Copyright (c) 2026 rejsamp contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "rejsamp/bench.hpp"
#include "rejsamp/sampler.hpp"
#include "rejsamp/stats.hpp"

namespace rejsamp::cli {

struct RunOutcome {
  RunResult result;
  BenchSpec spec;          // valid when a builtin family was sampled
  bool builtin = false;    // false for plugin targets
  TestResult dist_test;    // vs the oracle, when available
  bool dist_tested = false;
};

// Writes out_dir/report.json (the run report plus the distributional-test
// block when present).
void write_report(const RunOutcome& o, const std::string& out_dir);

// Writes out_dir/samples.csv or samples.f64le (row-major float64).
void write_samples(const RunResult& r, const std::string& out_dir, const std::string& format);

// One CSV row per run for bench/ablate outputs.
std::string csv_header();
std::string csv_row(const RunOutcome& o, const std::string& suite, int run_index, bool ok,
                    const std::string& error = "");

}  // namespace rejsamp::cli
