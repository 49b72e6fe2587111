// Copyright (c) 2026 rejsamp contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cassert>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

namespace rejsamp {

// Axis-aligned support box; bounds may be infinite per dimension.
class Domain {
 public:
  Domain() = default;
  Domain(std::vector<double> lower, std::vector<double> upper)
      : lower_(std::move(lower)), upper_(std::move(upper)) {
    if (lower_.size() != upper_.size() || lower_.empty())
      throw std::invalid_argument("domain bounds must be non-empty and of equal size");
    for (std::size_t i = 0; i < lower_.size(); ++i)
      if (!(lower_[i] < upper_[i])) throw std::invalid_argument("domain requires lower < upper");
  }

  static Domain unbounded(std::size_t dims) {
    const double inf = std::numeric_limits<double>::infinity();
    return Domain(std::vector<double>(dims, -inf), std::vector<double>(dims, inf));
  }

  std::size_t dims() const { return lower_.size(); }
  double lower(std::size_t i) const { return lower_[i]; }
  double upper(std::size_t i) const { return upper_[i]; }
  const std::vector<double>& lower() const { return lower_; }
  const std::vector<double>& upper() const { return upper_; }

  bool compact() const {
    for (std::size_t i = 0; i < dims(); ++i)
      if (std::isinf(lower_[i]) || std::isinf(upper_[i])) return false;
    return true;
  }

  bool contains(const std::vector<double>& x) const {
    if (x.size() != dims()) return false;
    for (std::size_t i = 0; i < dims(); ++i)
      if (x[i] < lower_[i] || x[i] > upper_[i]) return false;
    return true;
  }

  std::vector<double> center() const {
    require_compact();
    std::vector<double> c(dims());
    for (std::size_t i = 0; i < dims(); ++i) c[i] = 0.5 * (lower_[i] + upper_[i]);
    return c;
  }

  std::vector<double> range() const {
    require_compact();
    std::vector<double> r(dims());
    for (std::size_t i = 0; i < dims(); ++i) r[i] = upper_[i] - lower_[i];
    return r;
  }

  // Pulls x into the interior, a hair inside any finite bound.  Used by the
  // optimizers so gradient steps never evaluate the target on the boundary.
  void clamp_interior(std::vector<double>& x) const {
    for (std::size_t i = 0; i < dims(); ++i) {
      const double margin = interior_margin(i);
      if (x[i] < lower_[i] + margin) x[i] = lower_[i] + margin;
      if (x[i] > upper_[i] - margin) x[i] = upper_[i] - margin;
    }
  }

  double interior_margin(std::size_t i) const {
    if (std::isinf(lower_[i]) && std::isinf(upper_[i])) return 0.0;
    double scale = 1.0;
    if (!std::isinf(lower_[i]) && !std::isinf(upper_[i]))
      scale = upper_[i] - lower_[i];
    return 1e-9 * scale;
  }

 private:
  void require_compact() const {
    if (!compact()) throw std::logic_error("center/range require a compact domain");
  }

  std::vector<double> lower_;
  std::vector<double> upper_;
};

}  // namespace rejsamp
