#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace reinsopt::detail {

inline unsigned resolve_workers(unsigned requested) {
  if (requested > 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

// Calls body(i) for i in [0, n) on `workers` threads over contiguous chunks.
// The first exception thrown (lowest chunk wins) is rethrown on the caller.
template <class Body>
void parallel_for(std::size_t n, unsigned workers, Body&& body) {
  workers = static_cast<unsigned>(std::min<std::size_t>(resolve_workers(workers), std::max<std::size_t>(n, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    const std::size_t chunk = (n + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        const std::size_t lo = w * chunk, hi = std::min(n, lo + chunk);
        try {
          for (std::size_t i = lo; i < hi; ++i) body(i);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

// Neumaier compensated sum in index order.
template <class Range>
double compensated_sum(const Range& values) {
  double sum = 0.0, c = 0.0;
  for (double v : values) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v)) c += (sum - t) + v;
    else c += (v - t) + sum;
    sum = t;
  }
  return sum + c;
}

}  // namespace reinsopt::detail
