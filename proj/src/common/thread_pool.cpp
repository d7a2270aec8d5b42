#include "common/thread_pool.hpp"

namespace parkour {

ThreadPool::ThreadPool(int threads) {
  if (threads < 1) threads = static_cast<int>(std::thread::hardware_concurrency());
  if (threads < 1) threads = 1;
  n_threads_ = threads;
  workers_.reserve(n_threads_ - 1);
  for (int w = 1; w < n_threads_; ++w) {
    workers_.emplace_back([this, w] {
      std::uint64_t seen = 0;
      for (;;) {
        {
          std::unique_lock<std::mutex> lock(mu_);
          start_cv_.wait(lock, [&] { return stop_ || generation_ != seen; });
          if (stop_) return;
          seen = generation_;
        }
        run_chunk(w, n_threads_);
        {
          std::lock_guard<std::mutex> lock(mu_);
          if (--pending_ == 0) done_cv_.notify_one();
        }
      }
    });
  }
}

ThreadPool::~ThreadPool() {
  {
    std::lock_guard<std::mutex> lock(mu_);
    stop_ = true;
  }
  start_cv_.notify_all();
  for (std::thread& t : workers_) t.join();
}

void ThreadPool::run_chunk(int chunk, int chunks) const {
  const int lo = static_cast<int>(static_cast<long long>(n_) * chunk / chunks);
  const int hi = static_cast<int>(static_cast<long long>(n_) * (chunk + 1) / chunks);
  for (int i = lo; i < hi; ++i) (*fn_)(i);
}

void ThreadPool::parallel_for(int n, const std::function<void(int)>& fn) {
  if (n <= 0) return;
  if (n_threads_ == 1 || n == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  {
    std::lock_guard<std::mutex> lock(mu_);
    fn_ = &fn;
    n_ = n;
    pending_ = n_threads_ - 1;
    ++generation_;
  }
  start_cv_.notify_all();
  run_chunk(0, n_threads_);
  std::unique_lock<std::mutex> lock(mu_);
  done_cv_.wait(lock, [&] { return pending_ == 0; });
}

}  // namespace parkour
