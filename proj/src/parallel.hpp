#pragma once

// OpenMP loop helper that carries the first exception out of the parallel
// region and rethrows it on the calling thread.

#include <cstddef>
#include <exception>
#include <mutex>

namespace lobrep::detail {

template <typename Fn>
void parallel_for(std::size_t count, Fn&& body, bool dynamic = false) {
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const auto n = static_cast<std::ptrdiff_t>(count);
  auto guarded = [&](std::ptrdiff_t i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  };
  if (dynamic) {
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t i = 0; i < n; ++i) guarded(i);
  } else {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) guarded(i);
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace lobrep::detail
