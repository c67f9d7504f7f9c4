#pragma once

#include <condition_variable>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace cep {

// Fixed pool of workers for index-parallel loops. Tasks write their results
// into caller-owned slots addressed by index, so any reduction done afterwards
// in index order is independent of the worker count.
class Executor {
 public:
  // workers <= 1 runs everything on the calling thread.
  explicit Executor(int workers = 1);
  ~Executor();
  Executor(const Executor&) = delete;
  Executor& operator=(const Executor&) = delete;

  int workers() const { return workers_; }

  // Calls fn(i) for every i in [0, count) and waits for all of them. If any
  // call throws, the exception of the lowest failing index is rethrown after
  // the loop has drained.
  void parallel_for(int count, const std::function<void(int)>& fn);

 private:
  void worker_loop();
  void drain();

  int workers_;
  std::vector<std::thread> threads_;
  std::mutex mutex_;
  std::condition_variable wake_;
  std::condition_variable done_;
  const std::function<void(int)>* job_ = nullptr;
  int count_ = 0;
  int next_ = 0;
  int finished_ = 0;
  std::uint64_t generation_ = 0;
  bool stop_ = false;
  std::vector<std::exception_ptr> errors_;
};

}  // namespace cep
