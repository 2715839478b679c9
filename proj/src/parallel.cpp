#include "xview/parallel.hpp"

#include <algorithm>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace xview {

int resolve_workers(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallel_for(std::int64_t begin, std::int64_t end, int workers,
                  const std::function<void(std::int64_t, std::int64_t)>& body) {
  const std::int64_t n = end - begin;
  if (n <= 0) return;
  const auto chunks = static_cast<int>(std::min<std::int64_t>(std::max(workers, 1), n));
  if (chunks == 1) {
    body(begin, end);
    return;
  }

  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(chunks));
  const std::int64_t base = n / chunks;
  const std::int64_t extra = n % chunks;
  std::int64_t start = begin;
  for (int c = 0; c < chunks; ++c) {
    const std::int64_t stop = start + base + (c < extra ? 1 : 0);
    pool.emplace_back([&body, &error, &error_mutex, start, stop] {
      try {
        body(start, stop);
      } catch (...) {
        const std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
    start = stop;
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace xview
