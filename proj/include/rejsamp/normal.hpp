// Copyright (c) 2026 rejsamp contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>

// Scalar normal-distribution helpers shared by the proposal, the oracle
// samplers and the tests.  All functions work in double precision and keep
// full accuracy deep in the tails (|z| up to ~38), which truncated sampling
// near domain boundaries depends on.

namespace rejsamp {

inline constexpr double kLogTwoPi = 1.8378770664093454835606594728112;
inline constexpr double kSqrtTwoPi = 2.5066282746310005024157652848110;

inline double norm_logpdf(double z) { return -0.5 * (z * z + kLogTwoPi); }
inline double norm_pdf(double z) { return std::exp(norm_logpdf(z)); }

// Phi(z), exact to double precision via erfc.
double norm_cdf(double z);

// log Phi(z); switches to an asymptotic tail expansion where erfc underflows.
double norm_logcdf(double z);

// Inverse of Phi, Wichura's AS241 (PPND16) rational approximation, ~1 ulp.
double norm_icdf(double p);

// log(Phi(b) - Phi(a)) for a < b, stable when both ends sit in the same tail.
double norm_logmass(double a, double b);

// Inverse-CDF draw from a standard normal truncated to [a, b] given a
// uniform u in (0, 1).  Works with infinite bounds and bounds standardized
// far into a tail (the formula is re-anchored to the nearer tail so the
// probability arithmetic never cancels).
double truncnorm_standard_draw(double a, double b, double u);

}  // namespace rejsamp
