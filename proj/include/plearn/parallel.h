// Copyright 2026 The plearn Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PLEARN_PARALLEL_H_
#define PLEARN_PARALLEL_H_

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace plearn {

// Number of workers to use when the caller asked for `requested` (<= 0 means
// one per hardware thread).
inline int ResolveWorkers(int requested) {
  if (requested > 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

// Calls fn(k) for k in [0, count) on up to `workers` threads. Tasks must write
// to disjoint outputs; callers merge them in index order afterwards, which
// keeps results independent of scheduling. If tasks throw, the exception of
// the lowest failing index is rethrown.
template <typename Fn>
void ParallelFor(std::int64_t count, int workers, Fn&& fn) {
  workers = static_cast<int>(
      std::min<std::int64_t>(ResolveWorkers(workers), std::max<std::int64_t>(count, 1)));
  if (workers <= 1) {
    for (std::int64_t k = 0; k < count; ++k) fn(k);
    return;
  }
  std::atomic<std::int64_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr error;
  std::int64_t error_index = count;
  auto worker = [&] {
    for (std::int64_t k = next++; k < count; k = next++) {
      try {
        fn(k);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (k < error_index) {
          error_index = k;
          error = std::current_exception();
        }
      }
    }
  };
  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (int w = 0; w < workers; ++w) threads.emplace_back(worker);
  for (auto& t : threads) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace plearn

#endif  // PLEARN_PARALLEL_H_
