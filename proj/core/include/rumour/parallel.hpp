#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <type_traits>
#include <vector>

namespace rumour {

/// Default worker count: RUMOUR_WORKERS when set, else the hardware concurrency.
unsigned default_workers();

/// Evaluates fn(0), ..., fn(count - 1) on up to `workers` threads and returns
/// the results in index order, so the output never depends on scheduling.
template <typename Fn>
auto parallel_map(std::int64_t count, unsigned workers, Fn&& fn)
    -> std::vector<std::invoke_result_t<Fn&, std::int64_t>> {
  using R = std::invoke_result_t<Fn&, std::int64_t>;
  std::vector<R> out(static_cast<std::size_t>(std::max<std::int64_t>(count, 0)));
  if (count <= 0) return out;
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::min<std::int64_t>(count, 1024))));
  if (workers == 1) {
    for (std::int64_t i = 0; i < count; ++i) out[static_cast<std::size_t>(i)] = fn(i);
    return out;
  }
  constexpr std::int64_t chunk = 64;
  std::atomic<std::int64_t> next{0};
  std::exception_ptr error;
  std::int64_t error_index = count;
  std::mutex error_mutex;
  auto work = [&] {
    for (;;) {
      const std::int64_t start = next.fetch_add(chunk);
      if (start >= count) return;
      const std::int64_t stop = std::min(count, start + chunk);
      for (std::int64_t i = start; i < stop; ++i) {
        try {
          out[static_cast<std::size_t>(i)] = fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (i < error_index) {
            error_index = i;
            error = std::current_exception();
          }
        }
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
  return out;
}

}  // namespace rumour
