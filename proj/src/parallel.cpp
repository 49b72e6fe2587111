// Copyright (c) 2026 rejsamp contributors
// SPDX-License-Identifier: Apache-2.0
#include "rejsamp/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <mutex>
#include <thread>
#include <vector>

namespace rejsamp {

namespace {

// Minimal persistent pool; spawning threads per refinement step would
// dominate the runtime of small reductions.  Wakeups go through
// atomic wait/notify so idle workers cost nothing between passes.
class Pool {
 public:
  static Pool& instance() {
    static Pool pool;
    return pool;
  }

  int size() const { return static_cast<int>(workers_.size()); }

  void run(std::size_t njobs, const std::function<void(std::size_t)>& job) {
    std::unique_lock<std::mutex> guard(run_mutex_);
    job_ = &job;
    next_.store(0, std::memory_order_relaxed);
    remaining_.store(njobs, std::memory_order_relaxed);
    njobs_ = njobs;
    generation_.fetch_add(1, std::memory_order_release);
    generation_.notify_all();
    work();  // the calling thread participates
    for (std::size_t r = remaining_.load(std::memory_order_acquire); r != 0;
         r = remaining_.load(std::memory_order_acquire))
      remaining_.wait(r, std::memory_order_acquire);
    job_ = nullptr;
  }

 private:
  Pool() {
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const unsigned n = std::min(hw, 16u);
    for (unsigned i = 1; i < n; ++i) workers_.emplace_back([this] { worker_loop(); });
  }

  ~Pool() {
    stop_.store(true, std::memory_order_release);
    generation_.fetch_add(1, std::memory_order_release);
    generation_.notify_all();
    for (auto& w : workers_) w.join();
  }

  void worker_loop() {
    std::uint64_t seen = 0;
    while (true) {
      generation_.wait(seen, std::memory_order_acquire);
      if (stop_.load(std::memory_order_acquire)) return;
      seen = generation_.load(std::memory_order_acquire);
      work();
    }
  }

  void work() {
    while (true) {
      const std::size_t i = next_.fetch_add(1, std::memory_order_relaxed);
      if (i >= njobs_) return;
      (*job_)(i);
      if (remaining_.fetch_sub(1, std::memory_order_acq_rel) == 1) remaining_.notify_all();
    }
  }

  std::vector<std::thread> workers_;
  std::mutex run_mutex_;
  const std::function<void(std::size_t)>* job_ = nullptr;
  std::atomic<std::size_t> next_{0};
  std::atomic<std::size_t> remaining_{0};
  std::size_t njobs_ = 0;
  std::atomic<std::uint64_t> generation_{0};
  std::atomic<bool> stop_{false};
};

}  // namespace

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  return Pool::instance().size() + 1;
}

void for_chunks(std::size_t n, std::size_t chunk_size, int threads,
                const std::function<void(std::size_t, std::size_t, std::size_t)>& fn) {
  const std::size_t nchunks = chunk_count(n, chunk_size);
  if (nchunks == 0) return;
  const int workers = resolve_threads(threads);
  if (workers <= 1 || nchunks == 1) {
    for (std::size_t c = 0; c < nchunks; ++c)
      fn(c, c * chunk_size, std::min(n, (c + 1) * chunk_size));
    return;
  }
  const std::function<void(std::size_t)> job = [&](std::size_t c) {
    fn(c, c * chunk_size, std::min(n, (c + 1) * chunk_size));
  };
  Pool::instance().run(nchunks, job);
}

}  // namespace rejsamp
