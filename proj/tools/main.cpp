// Copyright (c) 2026 rejsamp contributors
// SPDX-License-Identifier: Apache-2.0
//
// Command line front end: single runs, the benchmark matrix, and the
// hard-constant ablation grid.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rejsamp/bench.hpp"
#include "rejsamp/plugin.hpp"
#include "rejsamp/sampler.hpp"
#include "rejsamp/stats.hpp"
#include "report_io.hpp"

namespace {

using namespace rejsamp;
using cli::RunOutcome;

constexpr int kExitOk = 0;
constexpr int kExitRunFailure = 1;
constexpr int kExitUsage = 2;
constexpr int kExitAuditViolation = 3;

struct TargetFlags {
  std::string family = "peakiness";
  double a = 1.0;
  std::size_t d = 1;
  double r = 0.5;
  std::string plugin_path;
};

LogTarget build_target(const TargetFlags& tf, BenchSpec* spec_out, bool* builtin) {
  if (!tf.plugin_path.empty()) {
    *builtin = false;
    return load_plugin_target(tf.plugin_path);
  }
  BenchSpec spec;
  spec.family = family_from_name(tf.family);
  spec.a = tf.a;
  spec.d = tf.d;
  spec.r = tf.r;
  *spec_out = spec;
  *builtin = true;
  return make_target(spec);
}

bool oracle_supported(const BenchSpec& spec) {
  switch (spec.family) {
    case Family::kPeakiness:
      return true;
    case Family::kSinusoid:
      return spec.d <= 7;
    case Family::kClutter:
      return spec.d <= 2;
  }
  return false;
}

// Distributional check of a finished run against the oracle sampler: KS on
// 1-D targets, Cramer otherwise (subsampled for the O(n^2) distances).
TestResult distribution_test(const BenchSpec& spec, const RunResult& res) {
  Rng rng(res.report.config.seed ^ 0x9e3779b97f4a7c15ull);
  const std::size_t n = res.samples.size() / res.dims;
  const auto oracle = oracle_sample(spec, n, rng);
  if (res.dims == 1) return ks_two_sample(res.samples, oracle);
  return cramer_two_sample(res.samples, oracle, res.dims, 200, rng, 2000);
}

RunOutcome execute(const LogTarget& target, const SamplerConfig& cfg, const BenchSpec& spec,
                   bool builtin, bool want_test) {
  RunOutcome o;
  o.spec = spec;
  o.builtin = builtin;
  o.result = run(target, cfg);
  if (want_test && builtin && !o.result.report.aborted && oracle_supported(spec)) {
    o.dist_test = distribution_test(spec, o.result);
    o.dist_tested = true;
  }
  return o;
}

int cmd_run(const TargetFlags& tf, SamplerConfig cfg, const std::string& out_dir,
            const std::string& samples_format, bool run_test) {
  BenchSpec spec;
  bool builtin = false;
  const LogTarget target = build_target(tf, &spec, &builtin);
  const RunOutcome o = execute(target, cfg, spec, builtin, run_test);
  cli::write_report(o, out_dir);
  cli::write_samples(o.result, out_dir, samples_format);
  std::cout << (builtin ? spec.label() : tf.plugin_path) << ": acceptance_rate="
            << o.result.report.acceptance_rate << " f_evals=" << o.result.report.f_evals
            << " audit=" << (o.result.report.audit.pass() ? "pass" : "FAIL");
  if (o.dist_tested) std::cout << " test_p=" << o.dist_test.p_value;
  std::cout << "\n";
  if (o.result.report.aborted) {
    std::cerr << "run aborted: " << o.result.report.abort_reason << "\n";
    return kExitRunFailure;
  }
  if (!o.result.report.audit.pass()) return kExitAuditViolation;
  return kExitOk;
}

int cmd_bench(const std::string& suite, SamplerConfig base, int runs, const std::string& out_dir,
              bool run_test) {
  std::vector<BenchSpec> cells;
  const auto add_peakiness = [&] {
    for (double a : {1.0, 5.0, 10.0, 15.0, 20.0}) cells.push_back({Family::kPeakiness, a, 1, 0.5});
  };
  const auto add_scaling = [&] {
    for (std::size_t d = 1; d <= 7; ++d) cells.push_back({Family::kSinusoid, 0.0, d, 0.5});
  };
  const auto add_clutter = [&] {
    cells.push_back({Family::kClutter, 0.0, 1, 0.5});
    cells.push_back({Family::kClutter, 0.0, 2, 0.5});
  };
  if (suite == "peakiness") add_peakiness();
  else if (suite == "scaling") add_scaling();
  else if (suite == "clutter") add_clutter();
  else if (suite == "all") {
    add_peakiness();
    add_scaling();
    add_clutter();
  } else {
    std::cerr << "unknown suite: " << suite << "\n";
    return kExitUsage;
  }

  std::filesystem::create_directories(out_dir);
  std::ofstream csv(out_dir + "/bench.csv");
  csv << cli::csv_header() << ",cell_mean_acceptance,cell_std_acceptance\n";
  for (const BenchSpec& spec : cells) {
    std::vector<std::string> rows;
    std::vector<double> rates;
    for (int run_index = 0; run_index < runs; ++run_index) {
      SamplerConfig cfg = base;
      cfg.seed = base.seed + static_cast<std::uint64_t>(run_index);
      try {
        const RunOutcome o = execute(make_target(spec), cfg, spec, true, run_test);
        rows.push_back(cli::csv_row(o, suite, run_index, !o.result.report.aborted,
                                    o.result.report.aborted ? o.result.report.abort_reason : ""));
        if (!o.result.report.aborted) rates.push_back(o.result.report.acceptance_rate);
      } catch (const std::exception& e) {
        RunOutcome failed;
        failed.spec = spec;
        failed.builtin = true;
        failed.result.report.config = cfg;
        rows.push_back(cli::csv_row(failed, suite, run_index, false, e.what()));
      }
    }
    double mean = 0.0, sd = 0.0;
    for (double rate : rates) mean += rate;
    if (!rates.empty()) mean /= static_cast<double>(rates.size());
    for (double rate : rates) sd += (rate - mean) * (rate - mean);
    if (rates.size() > 1) sd = std::sqrt(sd / static_cast<double>(rates.size() - 1));
    for (const auto& row : rows) csv << row << ',' << mean << ',' << sd << "\n";
    std::cout << spec.label() << ": mean acceptance " << mean << " (" << rates.size() << "/"
              << runs << " runs ok)\n";
  }
  return kExitOk;
}

int cmd_ablate(SamplerConfig base, const std::vector<double>& factors, const std::string& out_dir,
               double a) {
  // Scaled constants: multiplicative on n_base, accept_weight and the K-cap
  // divisor; the two ratio-style constants scale their increment above 1 so
  // a half-scale stays a valid inflation/growth factor.
  struct Knob {
    const char* name;
    void (*apply)(SamplerConfig&, double);
  };
  const std::vector<Knob> knobs = {
      {"n_base", [](SamplerConfig& c, double f) { c.n_base *= f; }},
      {"c_low_inflate",
       [](SamplerConfig& c, double f) { c.c_low_inflate = 1.0 + (c.c_low_inflate - 1.0) * f; }},
      {"accept_weight", [](SamplerConfig& c, double f) { c.accept_weight *= f; }},
      {"gmm_growth",
       [](SamplerConfig& c, double f) { c.gmm_growth = 1.0 + (c.gmm_growth - 1.0) * f; }},
      {"gmm_k_cap_divisor", [](SamplerConfig& c, double f) { c.gmm_k_cap_divisor *= f; }},
  };

  const BenchSpec spec{Family::kPeakiness, a, 1, 0.5};
  std::filesystem::create_directories(out_dir);
  std::ofstream csv(out_dir + "/ablate.csv");
  csv << "cell";
  for (const auto& k : knobs) csv << ',' << k.name << "_factor";
  csv << ',' << cli::csv_header() << "\n";

  double min_rate = 1.0, max_rate = 0.0;
  std::vector<std::size_t> idx(knobs.size(), 0);
  const std::size_t total = [&] {
    std::size_t t = 1;
    for (std::size_t i = 0; i < knobs.size(); ++i) t *= factors.size();
    return t;
  }();
  for (std::size_t cell = 0; cell < total; ++cell) {
    std::size_t rem = cell;
    SamplerConfig cfg = base;  // same seed in every cell
    std::vector<double> applied(knobs.size());
    for (std::size_t k = 0; k < knobs.size(); ++k) {
      applied[k] = factors[rem % factors.size()];
      rem /= factors.size();
      knobs[k].apply(cfg, applied[k]);
    }
    const RunOutcome o = execute(make_target(spec), cfg, spec, true, false);
    min_rate = std::min(min_rate, o.result.report.acceptance_rate);
    max_rate = std::max(max_rate, o.result.report.acceptance_rate);
    {
      char cell_dir[32];
      std::snprintf(cell_dir, sizeof(cell_dir), "cell%03zu", cell);
      cli::write_report(o, out_dir + "/" + cell_dir);
    }
    csv << cell;
    for (double f : applied) csv << ',' << f;
    csv << ',' << cli::csv_row(o, "ablate", static_cast<int>(cell), !o.result.report.aborted)
        << "\n";
  }
  std::cout << "ablation acceptance range: [" << min_rate << ", " << max_rate << "] spread "
            << (max_rate - min_rate) << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rejection sampler with self-built, gradient-refined mixture proposals"};
  app.require_subcommand(1);

  TargetFlags tf;
  SamplerConfig cfg;
  std::string out_dir = ".";
  std::string samples_format = "csv";
  std::string constants_file;
  int runs = 5;
  bool no_test = false;

  const auto add_target_flags = [&](CLI::App* sub, bool with_plugin) {
    sub->add_option("--family", tf.family, "builtin target family: peakiness|sinusoid|clutter");
    sub->add_option("--a", tf.a, "peakiness exponent");
    sub->add_option("--d", tf.d, "dimensions");
    sub->add_option("--r", tf.r, "clutter signal weight");
    if (with_plugin)
      sub->add_option("--target-plugin", tf.plugin_path, "shared-library target plugin path");
  };
  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--T", cfg.T, "accepted samples per run")->check(CLI::PositiveNumber);
    sub->add_option("--seed", cfg.seed, "base RNG seed");
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--constants-file", constants_file,
                    "JSON object overriding sampler constants");
    sub->add_option("--threads", cfg.threads, "refinement worker threads (0 = auto)");
  };

  CLI::App* srun = app.add_subcommand("run", "one sampling run; writes report.json and samples");
  add_target_flags(srun, true);
  add_common(srun);
  srun->add_option("--samples-format", samples_format, "csv | f64le")
      ->check(CLI::IsMember({"csv", "f64le"}));
  srun->add_flag("--no-test", no_test, "skip the distributional check against the oracle");

  CLI::App* sbench = app.add_subcommand("bench", "benchmark matrix; writes bench.csv");
  std::string suite = "all";
  sbench->add_option("--suite", suite, "peakiness | scaling | clutter | all");
  sbench->add_option("--runs", runs, "runs per cell")->check(CLI::PositiveNumber);
  add_common(sbench);
  sbench->add_flag("--no-test", no_test, "skip distributional checks");

  CLI::App* sablate = app.add_subcommand("ablate", "hard-constant grid; writes ablate.csv");
  std::vector<double> factors = {0.5, 2.0};
  sablate->add_option("--factors", factors, "scale factors per constant");
  sablate->add_option("--a", tf.a, "peakiness exponent for the grid");
  add_common(sablate);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (!constants_file.empty()) {
      std::ifstream in(constants_file);
      if (!in) throw std::runtime_error("cannot open constants file: " + constants_file);
      std::stringstream ss;
      ss << in.rdbuf();
      cfg.apply_json_overrides(ss.str());
    }
    cfg.validate();
    if (srun->parsed()) return cmd_run(tf, cfg, out_dir, samples_format, !no_test);
    if (sbench->parsed()) return cmd_bench(suite, cfg, runs, out_dir, !no_test);
    if (sablate->parsed()) return cmd_ablate(cfg, factors, out_dir, tf.a);
  } catch (const InitFailure& e) {
    std::cerr << "initialization failed: " << e.what() << "\n";
    return kExitRunFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
