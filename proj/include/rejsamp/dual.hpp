// Copyright (c) 2026 rejsamp contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

// Forward-mode dual numbers.  A Dual carries a value and the partial
// derivatives of that value with respect to the d seed variables, so one
// evaluation of a target written against this type yields log f and its full
// gradient.  Only the primitives required by target densities are provided.

namespace rejsamp {

class Dual {
 public:
  Dual() : value_(0.0) {}
  /* implicit */ Dual(double v) : value_(v) {}
  Dual(double v, std::size_t dims, std::size_t seed_index) : value_(v), partials_(dims, 0.0) {
    partials_[seed_index] = 1.0;
  }
  Dual(double v, std::vector<double> partials) : value_(v), partials_(std::move(partials)) {}

  double value() const { return value_; }
  const std::vector<double>& partials() const { return partials_; }
  std::size_t dims() const { return partials_.size(); }
  double partial(std::size_t i) const { return i < partials_.size() ? partials_[i] : 0.0; }

  Dual operator-() const {
    Dual r(*this);
    r.value_ = -r.value_;
    for (auto& p : r.partials_) p = -p;
    return r;
  }

  Dual& operator+=(const Dual& o) {
    value_ += o.value_;
    accumulate(o, 1.0);
    return *this;
  }
  Dual& operator-=(const Dual& o) {
    value_ -= o.value_;
    accumulate(o, -1.0);
    return *this;
  }
  Dual& operator*=(const Dual& o) {
    // (uv)' = u'v + uv'; scale own partials first, then add o's.
    for (auto& p : partials_) p *= o.value_;
    accumulate(o, value_);
    value_ *= o.value_;
    return *this;
  }
  Dual& operator/=(const Dual& o) {
    const double inv = 1.0 / o.value_;
    for (auto& p : partials_) p *= inv;
    accumulate(o, -value_ * inv * inv);
    value_ *= inv;
    return *this;
  }

  friend Dual operator+(Dual a, const Dual& b) { return a += b; }
  friend Dual operator-(Dual a, const Dual& b) { return a -= b; }
  friend Dual operator*(Dual a, const Dual& b) { return a *= b; }
  friend Dual operator/(Dual a, const Dual& b) { return a /= b; }

  friend bool operator<(const Dual& a, const Dual& b) { return a.value_ < b.value_; }
  friend bool operator>(const Dual& a, const Dual& b) { return a.value_ > b.value_; }
  friend bool operator<=(const Dual& a, const Dual& b) { return a.value_ <= b.value_; }
  friend bool operator>=(const Dual& a, const Dual& b) { return a.value_ >= b.value_; }

  // f(x) -> f(value) with partials scaled by f'(value).
  Dual apply(double fv, double dfv) const {
    Dual r(*this);
    r.value_ = fv;
    for (auto& p : r.partials_) p *= dfv;
    return r;
  }

 private:
  void accumulate(const Dual& o, double scale) {
    if (o.partials_.empty()) return;
    if (partials_.size() < o.partials_.size()) partials_.resize(o.partials_.size(), 0.0);
    for (std::size_t i = 0; i < o.partials_.size(); ++i) partials_[i] += scale * o.partials_[i];
  }

  double value_;
  std::vector<double> partials_;
};

inline Dual exp(const Dual& x) {
  const double e = std::exp(x.value());
  return x.apply(e, e);
}
inline Dual log(const Dual& x) { return x.apply(std::log(x.value()), 1.0 / x.value()); }
inline Dual log1p(const Dual& x) {
  return x.apply(std::log1p(x.value()), 1.0 / (1.0 + x.value()));
}
inline Dual sin(const Dual& x) { return x.apply(std::sin(x.value()), std::cos(x.value())); }
inline Dual cos(const Dual& x) { return x.apply(std::cos(x.value()), -std::sin(x.value())); }
inline Dual sqrt(const Dual& x) {
  const double s = std::sqrt(x.value());
  return x.apply(s, 0.5 / s);
}
inline Dual pow(const Dual& x, double e) {
  return x.apply(std::pow(x.value(), e), e * std::pow(x.value(), e - 1.0));
}
inline Dual pow(const Dual& x, const Dual& e) {
  // x^e = exp(e log x); requires x > 0 like std::pow on negative fractional.
  return exp(e * log(x));
}

// Seeds x as the identity Jacobian: point[i] becomes a Dual with d partials.
inline std::vector<Dual> seed_duals(const std::vector<double>& x) {
  std::vector<Dual> out;
  out.reserve(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out.emplace_back(x[i], x.size(), i);
  return out;
}

}  // namespace rejsamp
