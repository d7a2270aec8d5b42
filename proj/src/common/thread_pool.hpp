#pragma once

#include <condition_variable>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace parkour {

/// Persistent workers executing index-parallel loops. Work is split into one
/// fixed contiguous chunk per worker, so a given call always maps index i to
/// the same chunk regardless of scheduling; with independent per-index work
/// the results are identical for any thread count.
class ThreadPool {
 public:
  /// threads < 1 selects the hardware count; 1 runs everything inline.
  explicit ThreadPool(int threads = 1);
  ~ThreadPool();

  ThreadPool(const ThreadPool&) = delete;
  ThreadPool& operator=(const ThreadPool&) = delete;

  int size() const { return n_threads_; }

  /// Runs fn(0) … fn(n-1), returning after all calls complete. The calling
  /// thread works too. Must not be called re-entrantly from inside fn.
  void parallel_for(int n, const std::function<void(int)>& fn);

 private:
  void run_chunk(int chunk, int chunks) const;

  int n_threads_ = 1;
  std::vector<std::thread> workers_;
  std::mutex mu_;
  std::condition_variable start_cv_, done_cv_;
  const std::function<void(int)>* fn_ = nullptr;
  int n_ = 0;
  std::uint64_t generation_ = 0;
  int pending_ = 0;
  bool stop_ = false;
};

}  // namespace parkour
