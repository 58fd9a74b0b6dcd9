// SPDX-License-Identifier: Apache-2.0
#include "lens/parallel.hpp"

#include <atomic>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>
#include <vector>

#include "lens/errors.hpp"

namespace lens {

void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& fn) {
  if (jobs < 1) throw DomainError("parallel_for: jobs must be >= 1");
  const std::size_t workers =
      std::min<std::size_t>(static_cast<std::size_t>(jobs), count);

  std::exception_ptr first_error;
  std::size_t first_error_index = std::numeric_limits<std::size_t>::max();
  std::mutex error_mutex;

  auto record = [&](std::size_t i, std::exception_ptr e) {
    std::lock_guard<std::mutex> lock(error_mutex);
    if (i < first_error_index) {
      first_error_index = i;
      first_error = e;
    }
  };

  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) {
      try {
        fn(i);
      } catch (...) {
        record(i, std::current_exception());
      }
    }
  } else {
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
        if (i >= count) return;
        try {
          fn(i);
        } catch (...) {
          record(i, std::current_exception());
        }
      }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace lens
