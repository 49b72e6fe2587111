// Copyright (c) 2026 rejsamp contributors
// SPDX-License-Identifier: Apache-2.0
//
// Demo target plugin: a soft wedge on (0, inf), log f = -x - 0.5 log(1+x).

#include <rejsamp/plugin.hpp>

template <class S>
S wedge_log_density(const S* x, int /*dims*/) {
  return -x[0] - 0.5 * log1p(x[0]);
}

REJSAMP_PLUGIN(wedge_log_density, 1, REJSAMP_BOUNDS(0.0), REJSAMP_BOUNDS(HUGE_VAL))
