// Copyright (c) 2026 rejsamp contributors
// SPDX-License-Identifier: Apache-2.0
//
// Python bindings for the sampler core: built-in benchmark targets, custom
// log-densities supplied as Python callables, oracle sampling and the
// two-sample tests.

#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <json.hpp>

#include "rejsamp/bench.hpp"
#include "rejsamp/sampler.hpp"
#include "rejsamp/stats.hpp"

namespace py = pybind11;
using namespace rejsamp;

namespace {

BenchSpec spec_from_args(const std::string& family, double a, std::size_t d, double r) {
  BenchSpec spec;
  spec.family = family_from_name(family);
  spec.a = a;
  spec.d = d;
  spec.r = r;
  return spec;
}

SamplerConfig config_from_kwargs(std::int64_t T, std::uint64_t seed, const std::string& overrides,
                                 int threads) {
  SamplerConfig cfg;
  cfg.T = T;
  cfg.seed = seed;
  cfg.threads = threads;
  if (!overrides.empty()) cfg.apply_json_overrides(overrides);
  cfg.validate();
  return cfg;
}

py::array_t<double> as_matrix(const std::vector<double>& flat, std::size_t d) {
  const std::size_t n = d == 0 ? 0 : flat.size() / d;
  py::array_t<double> out({n, d});
  std::copy(flat.begin(), flat.end(), out.mutable_data());
  return out;
}

std::vector<double> from_matrix(const py::array_t<double, py::array::c_style>& arr,
                                std::size_t* d_out) {
  if (arr.ndim() == 1) {
    *d_out = 1;
    return std::vector<double>(arr.data(), arr.data() + arr.size());
  }
  if (arr.ndim() != 2) throw std::invalid_argument("expected a 1-D or 2-D array");
  *d_out = static_cast<std::size_t>(arr.shape(1));
  return std::vector<double>(arr.data(), arr.data() + arr.size());
}

py::dict run_to_dict(const RunResult& res) {
  py::dict out;
  out["samples"] = as_matrix(res.samples, res.dims);
  py::module_ json = py::module_::import("json");
  out["report"] = json.attr("loads")(res.report.to_json());
  return out;
}

LogTarget target_from_python(py::function log_density, py::function gradient,
                             std::vector<double> lower, std::vector<double> upper) {
  LogTarget t;
  t.domain = Domain(std::move(lower), std::move(upper));
  t.eval = [log_density](const std::vector<double>& x) {
    py::gil_scoped_acquire gil;
    return log_density(x).cast<double>();
  };
  t.provides_gradient = true;
  t.gradient = [gradient](const std::vector<double>& x) {
    py::gil_scoped_acquire gil;
    return gradient(x).cast<std::vector<double>>();
  };
  return t;
}

}  // namespace

PYBIND11_MODULE(_rejsamp, m) {
  m.doc() = "Rejection sampling with self-built, gradient-refined mixture proposals";

  py::register_exception<InitFailure>(m, "InitFailure");
  py::register_exception<TargetError>(m, "TargetError");

  m.def(
      "run",
      [](const std::string& family, double a, std::size_t d, double r, std::int64_t T,
         std::uint64_t seed, const std::string& config_json, int threads) {
        const BenchSpec spec = spec_from_args(family, a, d, r);
        const SamplerConfig cfg = config_from_kwargs(T, seed, config_json, threads);
        RunResult res;
        {
          py::gil_scoped_release release;
          res = run(make_target(spec), cfg);
        }
        return run_to_dict(res);
      },
      py::arg("family"), py::arg("a") = 1.0, py::arg("d") = 1, py::arg("r") = 0.5,
      py::arg("T") = 10000, py::arg("seed") = 0, py::arg("config_json") = "",
      py::arg("threads") = 1,
      "Draw T samples from a built-in benchmark target; returns {'samples', 'report'}.");

  m.def(
      "run_custom",
      [](py::function log_density, py::function gradient, std::vector<double> lower,
         std::vector<double> upper, std::int64_t T, std::uint64_t seed,
         const std::string& config_json, int threads) {
        const LogTarget t =
            target_from_python(std::move(log_density), std::move(gradient), std::move(lower),
                               std::move(upper));
        const SamplerConfig cfg = config_from_kwargs(T, seed, config_json, threads);
        // Python callables keep the GIL, so the run stays on this thread.
        const RunResult res = run(t, cfg);
        return run_to_dict(res);
      },
      py::arg("log_density"), py::arg("gradient"), py::arg("lower"), py::arg("upper"),
      py::arg("T") = 1000, py::arg("seed") = 0, py::arg("config_json") = "",
      py::arg("threads") = 1,
      "Sample a custom target given log-density and gradient callables over a box domain "
      "(use +-inf bounds for unbounded sides).");

  m.def(
      "log_density",
      [](const std::string& family, double a, std::size_t d, double r,
         const py::array_t<double, py::array::c_style>& x) {
        const BenchSpec spec = spec_from_args(family, a, d, r);
        const LogTarget t = make_target(spec);
        std::size_t dd = 0;
        const std::vector<double> flat = from_matrix(x, &dd);
        if (dd != spec.d) throw std::invalid_argument("point dimension mismatch");
        const std::size_t n = flat.size() / dd;
        py::array_t<double> out(n);
        for (std::size_t i = 0; i < n; ++i)
          out.mutable_data()[i] =
              log_density(t, std::vector<double>(flat.begin() + i * dd,
                                                 flat.begin() + (i + 1) * dd));
        return out;
      },
      py::arg("family"), py::arg("a"), py::arg("d"), py::arg("r"), py::arg("x"),
      "Evaluate the built-in family's unnormalized log density row-wise.");

  m.def(
      "oracle_sample",
      [](const std::string& family, double a, std::size_t d, double r, std::size_t n,
         std::uint64_t seed) {
        const BenchSpec spec = spec_from_args(family, a, d, r);
        Rng rng(seed);
        return as_matrix(oracle_sample(spec, n, rng), spec.family == Family::kPeakiness ? 1
                                                                                        : spec.d);
      },
      py::arg("family"), py::arg("a") = 1.0, py::arg("d") = 1, py::arg("r") = 0.5,
      py::arg("n") = 1000, py::arg("seed") = 0,
      "Ground-truth samples from the grid-inversion oracle.");

  m.def(
      "ks_two_sample",
      [](const py::array_t<double, py::array::c_style>& x,
         const py::array_t<double, py::array::c_style>& y) {
        std::vector<double> xs(x.data(), x.data() + x.size());
        std::vector<double> ys(y.data(), y.data() + y.size());
        const TestResult r = ks_two_sample(std::move(xs), std::move(ys));
        return py::make_tuple(r.statistic, r.p_value);
      },
      py::arg("x"), py::arg("y"), "Two-sample KS test: returns (statistic, p_value).");

  m.def(
      "cramer_two_sample",
      [](const py::array_t<double, py::array::c_style>& x,
         const py::array_t<double, py::array::c_style>& y, int permutations, std::uint64_t seed,
         std::size_t subsample_cap) {
        std::size_t dx = 0, dy = 0;
        const std::vector<double> xs = from_matrix(x, &dx);
        const std::vector<double> ys = from_matrix(y, &dy);
        if (dx != dy) throw std::invalid_argument("dimension mismatch");
        Rng rng(seed);
        const TestResult r = cramer_two_sample(xs, ys, dx, permutations, rng, subsample_cap);
        return py::make_tuple(r.statistic, r.p_value);
      },
      py::arg("x"), py::arg("y"), py::arg("permutations") = 200, py::arg("seed") = 0,
      py::arg("subsample_cap") = 5000,
      "Two-sample Cramer (energy) permutation test: returns (statistic, p_value).");

#ifdef VERSION_INFO
#define STRINGIFY(x) #x
#define MACRO_STRINGIFY(x) STRINGIFY(x)
  m.attr("__version__") = MACRO_STRINGIFY(VERSION_INFO);
#else
  m.attr("__version__") = "dev";
#endif
}
