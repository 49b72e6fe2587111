// Copyright (c) 2026 rejsamp contributors
// SPDX-License-Identifier: Apache-2.0
#include "rejsamp/normal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rejsamp {

namespace {

constexpr double kSqrt2 = 1.4142135623730950488016887242097;
constexpr double kInf = std::numeric_limits<double>::infinity();

// log of the upper-tail mass Q(z) = 1 - Phi(z) for z >= 0.
double log_upper_tail(double z) {
  if (z < 25.0) {
    // erfc keeps ~full precision down to its underflow near z ~ 37; use it
    // while the result is comfortably inside the normal range.
    return std::log(0.5 * std::erfc(z / kSqrt2));
  }
  // Asymptotic series Q(z) ~ phi(z)/z * (1 - 1/z^2 + 3/z^4 - 15/z^6 + ...).
  const double z2 = z * z;
  double series = 1.0 - 1.0 / z2 + 3.0 / (z2 * z2) - 15.0 / (z2 * z2 * z2);
  return norm_logpdf(z) - std::log(z) + std::log(series);
}

}  // namespace

double norm_cdf(double z) {
  if (std::isnan(z)) return std::numeric_limits<double>::quiet_NaN();
  return 0.5 * std::erfc(-z / kSqrt2);
}

double norm_logcdf(double z) {
  if (z >= 0.0) {
    // log(1 - Q(z)); Q <= 1/2 so log1p is safe.
    return std::log1p(-0.5 * std::erfc(z / kSqrt2));
  }
  return log_upper_tail(-z);
}

double norm_icdf(double p) {
  // AS241 algorithm PPND16 (Wichura 1988).
  if (!(p > 0.0 && p < 1.0)) {
    if (p == 0.0) return -kInf;
    if (p == 1.0) return kInf;
    return std::numeric_limits<double>::quiet_NaN();
  }
  const double q = p - 0.5;
  if (std::abs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q *
           (((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r +
                 6.7265770927008700853e+4) *
                    r +
                4.5921953931549871457e+4) *
                   r +
               1.3731693765509461125e+4) *
                  r +
              1.9715909503065514427e+3) *
                 r +
             1.3314166789178437745e+2) *
                r +
            3.3871328727963666080e+0) /
           (((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r +
                 3.9307895800092710610e+4) *
                    r +
                2.1213794301586595867e+4) *
                   r +
               5.3941960214247511077e+3) *
                  r +
              6.8718700749205790830e+2) *
                 r +
             4.2313330701600911252e+1) *
                r +
            1.0);
  }
  double r = (q < 0.0) ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double x;
  if (r <= 5.0) {
    r -= 1.6;
    x = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
              2.41780725177450611770e-1) *
                 r +
             1.27045825245236838258e+0) *
                r +
            3.64784832476320460504e+0) *
               r +
           5.76949722146069140550e+0) *
              r +
          4.63033784615654529590e+0) *
             r +
         1.42343711074968357734e+0) /
        (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
              1.51986665636164571966e-2) *
                 r +
             1.48103976427480074590e-1) *
                r +
            6.89767334985100004550e-1) *
               r +
           1.67638483018380384940e+0) *
              r +
          2.05319162663775882187e+0) *
             r +
         1.0);
  } else {
    r -= 5.0;
    x = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
              1.24266094738807843860e-3) *
                 r +
             2.65321895265761230930e-2) *
                r +
            2.96560571828504891230e-1) *
               r +
           1.78482653991729133580e+0) *
              r +
          5.46378491116411436990e+0) *
             r +
         6.65790464350110377720e+0) /
        (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
              1.84631831751005468180e-5) *
                 r +
             7.86869131145613259100e-4) *
                r +
            1.48753612908506148525e-2) *
               r +
           1.36929880922735805310e-1) *
              r +
          5.99832206555887937690e-1) *
             r +
         1.0);
  }
  return (q < 0.0) ? -x : x;
}

double norm_logmass(double a, double b) {
  if (!(a < b)) return -kInf;
  if (a == -kInf && b == kInf) return 0.0;
  // Mirror into the left tail so we always subtract CDFs of the same sign.
  if (a >= 0.0) return norm_logmass(-b, -a);
  const double log_cdf_b = norm_logcdf(b);
  const double log_cdf_a = (a == -kInf) ? -kInf : norm_logcdf(a);
  if (log_cdf_a == -kInf) return log_cdf_b;
  const double diff = log_cdf_a - log_cdf_b;  // <= 0
  // log(e^lb - e^la) = lb + log1p(-e^{la-lb})
  const double tail = -std::expm1(diff);
  if (tail <= 0.0) return -kInf;
  return log_cdf_b + std::log(tail);
}

double truncnorm_standard_draw(double a, double b, double u) {
  if (a == -kInf && b == kInf) return norm_icdf(u);
  if (a >= 0.0) {
    // Both bounds in the upper tail (or spanning from 0): work with upper
    // tail probabilities, which stay far from 1 and keep icdf accurate.
    const double qa = norm_cdf(-a);
    const double qb = (b == kInf) ? 0.0 : norm_cdf(-b);
    const double q = qa - u * (qa - qb);
    return -norm_icdf(q);
  }
  if (b <= 0.0) return -truncnorm_standard_draw(-b, -a, 1.0 - u);
  const double pa = norm_cdf(a);
  const double pb = norm_cdf(b);
  return norm_icdf(pa + u * (pb - pa));
}

}  // namespace rejsamp
