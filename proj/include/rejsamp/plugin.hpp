// Copyright (c) 2026 rejsamp contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

// Shared-library target plugins.
//
// A plugin is a shared object exporting `rejsamp_plugin_create`, which
// returns a static descriptor with the dimension, the support bounds
// (+-HUGE_VAL for unbounded sides) and two entry points: a plain log-density
// and a value+gradient evaluation.  Authors writing the density as a
// template over the scalar type get both entry points, with the gradient
// computed by forward-mode duals, from the REJSAMP_PLUGIN macro:
//
//   #include <rejsamp/plugin.hpp>
//   template <class S>
//   S ring_density(const S* x, int dims) {
//     S q = 0.0;
//     for (int i = 0; i < dims; ++i) q += x[i] * x[i];
//     return -q;
//   }
//   REJSAMP_PLUGIN(ring_density, 2, REJSAMP_BOUNDS(-10.0, -10.0),
//                  REJSAMP_BOUNDS(10.0, 10.0))

#include <string>
#include <vector>

#include "rejsamp/dual.hpp"
#include "rejsamp/target.hpp"

extern "C" {

struct rejsamp_plugin_v1 {
  int abi_version;  // 1
  int dims;
  const double* lower;  // length dims
  const double* upper;  // length dims
  double (*log_density)(const double* x, int dims);
  void (*log_density_grad)(const double* x, int dims, double* out_value, double* out_grad);
};

}  // extern "C"

#define REJSAMP_BOUNDS(...) \
  { __VA_ARGS__ }

#define REJSAMP_PLUGIN(FN, DIMS, LOWER, UPPER)                                     \
  static double rejsamp_plugin_value_(const double* x, int dims) {                 \
    return FN<double>(x, dims);                                                    \
  }                                                                                \
  static void rejsamp_plugin_grad_(const double* x, int dims, double* out_value,   \
                                   double* out_grad) {                             \
    std::vector<rejsamp::Dual> xs;                                                 \
    xs.reserve(static_cast<std::size_t>(dims));                                    \
    for (int i = 0; i < dims; ++i)                                                 \
      xs.emplace_back(x[i], static_cast<std::size_t>(dims), static_cast<std::size_t>(i)); \
    const rejsamp::Dual r = FN<rejsamp::Dual>(xs.data(), dims);                    \
    *out_value = r.value();                                                        \
    for (int i = 0; i < dims; ++i) out_grad[i] = r.partial(static_cast<std::size_t>(i)); \
  }                                                                                \
  extern "C" const rejsamp_plugin_v1* rejsamp_plugin_create() {                    \
    static const double rejsamp_plugin_lower_[] = LOWER;                           \
    static const double rejsamp_plugin_upper_[] = UPPER;                           \
    static const rejsamp_plugin_v1 plugin = {1,                                    \
                                             DIMS,                                 \
                                             rejsamp_plugin_lower_,                \
                                             rejsamp_plugin_upper_,                \
                                             &rejsamp_plugin_value_,               \
                                             &rejsamp_plugin_grad_};               \
    return &plugin;                                                                \
  }

namespace rejsamp {

// dlopen the plugin and wrap it as a LogTarget.  The handle stays loaded for
// the life of the process.
LogTarget load_plugin_target(const std::string& path);

}  // namespace rejsamp
