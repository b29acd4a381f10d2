#pragma once

#include <cstddef>
#include <exception>
#include <mutex>

namespace qmpemba::detail {

// Runs body(i) for i in [0, n) with an OpenMP worksharing loop. Each index must
// write only its own output slot. The first exception thrown by any iteration
// is rethrown on the calling thread after the loop.
template <class Body>
void parallel_for(std::size_t n, Body&& body) {
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic)
  for (long long i = 0; i < count; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      std::lock_guard<std::mutex> lock(failure_mutex);
      if (!failure) {
        failure = std::current_exception();
      }
    }
  }
  if (failure) {
    std::rethrow_exception(failure);
  }
}

} // namespace qmpemba::detail
