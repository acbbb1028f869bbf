#include "pottslab/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace pottslab {

unsigned resolve_workers(unsigned requested) noexcept {
  if (requested != 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

void parallel_chunks(std::uint64_t count, std::size_t chunks, unsigned workers,
                     const std::function<void(std::size_t, std::uint64_t, std::uint64_t)>& body) {
  if (count == 0) return;
  chunks = static_cast<std::size_t>(std::clamp<std::uint64_t>(chunks, 1, count));
  const auto bounds = [&](std::size_t c) { return count * c / chunks; };

  workers = std::min<unsigned>(resolve_workers(workers), static_cast<unsigned>(std::min<std::size_t>(chunks, 1u << 12)));
  if (workers <= 1) {
    for (std::size_t c = 0; c < chunks; ++c) body(c, bounds(c), bounds(c + 1));
    return;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto run = [&] {
    for (std::size_t c = next++; c < chunks; c = next++) {
      try {
        body(c, bounds(c), bounds(c + 1));
      } catch (...) {
        std::lock_guard lock(failure_mu);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  std::vector<std::jthread> pool;
  pool.reserve(workers - 1);
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(run);
  run();
  pool.clear();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace pottslab
