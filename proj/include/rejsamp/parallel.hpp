// Copyright (c) 2026 rejsamp contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <functional>

namespace rejsamp {

// Runs fn(chunk_index, begin, end) over [0, n) split into fixed-size chunks.
// Chunk boundaries depend only on n and chunk_size, never on the worker
// count, so callers that combine per-chunk results in chunk order get
// bitwise-identical reductions at any thread count.
void for_chunks(std::size_t n, std::size_t chunk_size, int threads,
                const std::function<void(std::size_t, std::size_t, std::size_t)>& fn);

inline std::size_t chunk_count(std::size_t n, std::size_t chunk_size) {
  return n == 0 ? 0 : (n + chunk_size - 1) / chunk_size;
}

// Worker count actually used for a given request (0 = hardware concurrency).
int resolve_threads(int requested);

}  // namespace rejsamp
