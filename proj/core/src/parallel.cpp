// Copyright 2026 The lfkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "lfkit/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <condition_variable>
#include <cstdlib>
#include <mutex>
#include <thread>
#include <vector>

namespace lfkit {
namespace {

int default_threads() {
  if (const char* env = std::getenv("LFKIT_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

std::atomic<int> g_threads{0};

// Lazily started pool of (thread_count - 1) detached workers; the caller
// executes the first chunk itself. One parallel_for runs at a time; nested or
// concurrent calls fall back to the calling thread via the busy flag.
class Pool {
 public:
  static Pool& instance() {
    static Pool* pool = new Pool;  // leaked so detached workers never outlive it
    return *pool;
  }

  bool try_acquire() { return !busy_.exchange(true, std::memory_order_acquire); }
  void release() { busy_.store(false, std::memory_order_release); }

  void run(std::int64_t n, int nthreads, const std::function<void(std::int64_t, std::int64_t)>& fn) {
    ensure_workers(nthreads - 1);
    const std::int64_t chunk = (n + nthreads - 1) / nthreads;
    {
      std::unique_lock<std::mutex> lock(mu_);
      fn_ = &fn;
      total_ = n;
      chunk_ = chunk;
      next_ = chunk;  // chunk 0 belongs to the caller
      pending_ = static_cast<int>(workers_);
      ++generation_;
    }
    cv_work_.notify_all();
    fn(0, std::min<std::int64_t>(chunk, n));
    std::unique_lock<std::mutex> lock(mu_);
    cv_done_.wait(lock, [this] { return pending_ == 0; });
    fn_ = nullptr;
  }

 private:
  void ensure_workers(int wanted) {
    std::unique_lock<std::mutex> lock(mu_);
    while (workers_ < wanted) {
      std::thread([this] { worker_loop(); }).detach();
      ++workers_;
    }
  }

  void worker_loop() {
    std::uint64_t seen = 0;
    for (;;) {
      const std::function<void(std::int64_t, std::int64_t)>* fn = nullptr;
      std::int64_t begin = 0, end = 0;
      {
        std::unique_lock<std::mutex> lock(mu_);
        cv_work_.wait(lock, [&] { return generation_ != seen; });
        seen = generation_;
        fn = fn_;
        begin = next_;
        next_ += chunk_;
        end = std::min(begin + chunk_, total_);
      }
      if (fn && begin < end) (*fn)(begin, end);
      {
        std::unique_lock<std::mutex> lock(mu_);
        if (--pending_ == 0) cv_done_.notify_one();
      }
    }
  }

  std::mutex mu_;
  std::condition_variable cv_work_, cv_done_;
  std::atomic<bool> busy_{false};
  int workers_ = 0;
  const std::function<void(std::int64_t, std::int64_t)>* fn_ = nullptr;
  std::int64_t total_ = 0, chunk_ = 0, next_ = 0;
  int pending_ = 0;
  std::uint64_t generation_ = 0;
};

}  // namespace

int thread_count() {
  int n = g_threads.load(std::memory_order_relaxed);
  if (n == 0) {
    n = default_threads();
    g_threads.store(n, std::memory_order_relaxed);
  }
  return n;
}

void set_thread_count(int n) { g_threads.store(n > 0 ? n : 1, std::memory_order_relaxed); }

void parallel_for(std::int64_t n, const std::function<void(std::int64_t, std::int64_t)>& fn) {
  if (n <= 0) return;
  const int nthreads = static_cast<int>(std::min<std::int64_t>(thread_count(), n));
  Pool& pool = Pool::instance();
  if (nthreads <= 1 || !pool.try_acquire()) {
    fn(0, n);
    return;
  }
  pool.run(n, nthreads, fn);
  pool.release();
}

}  // namespace lfkit
