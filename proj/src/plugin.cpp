// Copyright (c) 2026 rejsamp contributors
// SPDX-License-Identifier: Apache-2.0
#include "rejsamp/plugin.hpp"

#include <dlfcn.h>

#include <cmath>
#include <stdexcept>

namespace rejsamp {

LogTarget load_plugin_target(const std::string& path) {
  void* handle = dlopen(path.c_str(), RTLD_NOW | RTLD_LOCAL);
  if (handle == nullptr)
    throw std::runtime_error("cannot load target plugin: " + std::string(dlerror()));
  using CreateFn = const rejsamp_plugin_v1* (*)();
  auto create = reinterpret_cast<CreateFn>(dlsym(handle, "rejsamp_plugin_create"));
  if (create == nullptr)
    throw std::runtime_error("plugin lacks rejsamp_plugin_create: " + path);
  const rejsamp_plugin_v1* p = create();
  if (p == nullptr || p->abi_version != 1)
    throw std::runtime_error("plugin ABI mismatch (want v1): " + path);
  if (p->dims < 1 || p->lower == nullptr || p->upper == nullptr ||
      p->log_density == nullptr || p->log_density_grad == nullptr)
    throw std::runtime_error("plugin descriptor incomplete: " + path);

  const int dims = p->dims;
  LogTarget t;
  t.domain = Domain(std::vector<double>(p->lower, p->lower + dims),
                    std::vector<double>(p->upper, p->upper + dims));
  t.eval = [p, dims](const std::vector<double>& x) { return p->log_density(x.data(), dims); };
  t.eval_dual = [p, dims](const std::vector<Dual>& xs) {
    std::vector<double> x(xs.size());
    std::size_t width = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      x[i] = xs[i].value();
      width = std::max(width, xs[i].dims());
    }
    double value = 0.0;
    std::vector<double> grad(xs.size(), 0.0);
    p->log_density_grad(x.data(), dims, &value, grad.data());
    // Chain rule through whatever seeding the caller used.
    std::vector<double> partials(width, 0.0);
    for (std::size_t i = 0; i < xs.size(); ++i)
      for (std::size_t j = 0; j < width; ++j) partials[j] += grad[i] * xs[i].partial(j);
    return Dual(value, std::move(partials));
  };
  return t;
}

}  // namespace rejsamp
