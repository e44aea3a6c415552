#pragma once

#include <cstddef>
#include <exception>
#include <mutex>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace inar {

/// Worker count for data-parallel loops. threads == 1 selects the plain
/// serial loop, which is kept as the reference the parallel path is tested
/// against; threads == 0 means "available parallelism".
struct Execution {
  int threads = 0;

  [[nodiscard]] static Execution serial() { return Execution{1}; }
  [[nodiscard]] int resolved_threads() const {
#ifdef _OPENMP
    return threads > 0 ? threads : omp_get_max_threads();
#else
    return 1;
#endif
  }
};

/// Runs fn(i) for i in [0, count). Iterations must be independent; results
/// are expected to be written to per-index slots so the outcome does not
/// depend on scheduling. The first exception thrown is rethrown after the loop.
template <class Fn>
void parallel_for(std::size_t count, const Execution& exec, Fn&& fn) {
  const int threads = exec.resolved_threads();
  if (threads <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::exception_ptr error;
  std::mutex error_mutex;
  const auto n = static_cast<long long>(count);
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
  for (long long i = 0; i < n; ++i) {
    try {
      fn(static_cast<std::size_t>(i));
    } catch (...) {
      std::lock_guard lock(error_mutex);
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace inar
