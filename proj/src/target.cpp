// Copyright (c) 2026 rejsamp contributors
// SPDX-License-Identifier: Apache-2.0
#include "rejsamp/target.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace rejsamp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string describe_point(const std::vector<double>& x) {
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x[i];
  os << ")";
  return os.str();
}

}  // namespace

double log_density(const LogTarget& t, const std::vector<double>& x) {
  if (x.size() != t.domain.dims()) throw std::invalid_argument("point/domain dimension mismatch");
  if (!t.domain.contains(x)) return -kInf;
  const double v = t.eval(x);
  if (std::isnan(v))
    throw TargetError("target returned NaN at " + describe_point(x) +
                      "; zero density must be reported as -inf");
  return v;
}

std::optional<std::vector<double>> grad_log_density(const LogTarget& t,
                                                    const std::vector<double>& x) {
  std::vector<double> g;
  if (t.provides_gradient) {
    g = t.gradient(x);
  } else {
    const Dual r = t.eval_dual(seed_duals(x));
    g.resize(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) g[i] = r.partial(i);
  }
  for (double gi : g)
    if (!std::isfinite(gi)) return std::nullopt;
  return g;
}

TargetEvaluator::ValueGrad TargetEvaluator::value_grad(const std::vector<double>& x) {
  ++count_;
  ValueGrad out;
  out.grad.resize(x.size(), 0.0);
  if (!target_->domain.contains(x)) {
    out.value = -kInf;
    out.grad_ok = false;
    return out;
  }
  if (target_->provides_gradient) {
    out.value = log_density(*target_, x);
    if (out.value == -kInf) {
      out.grad_ok = false;
      return out;
    }
    out.grad = target_->gradient(x);
  } else {
    const Dual r = target_->eval_dual(seed_duals(x));
    if (std::isnan(r.value()))
      throw TargetError("target returned NaN at " + describe_point(x));
    out.value = r.value();
    if (out.value == -kInf) {
      out.grad_ok = false;
      return out;
    }
    for (std::size_t i = 0; i < x.size(); ++i) out.grad[i] = r.partial(i);
  }
  out.grad_ok = true;
  for (double gi : out.grad)
    if (!std::isfinite(gi)) out.grad_ok = false;
  return out;
}

}  // namespace rejsamp
