#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace ssdcnn {

/// Splits [0, n) into `threads` contiguous chunks and runs
/// fn(begin, end, worker) on each. Chunk boundaries depend only on n and
/// the thread count. The first exception thrown by a worker is rethrown.
template <class Fn>
void parallel_chunks(std::size_t n, int threads, Fn&& fn) {
  const std::size_t t = std::min<std::size_t>(static_cast<std::size_t>(std::max(threads, 1)), std::max<std::size_t>(n, 1));
  if (t == 1) {
    fn(std::size_t{0}, n, std::size_t{0});
    return;
  }
  std::vector<std::exception_ptr> errors(t);
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < t; ++w) {
      pool.emplace_back([&, w] {
        try {
          fn(n * w / t, n * (w + 1) / t, w);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace ssdcnn
