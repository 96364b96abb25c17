#pragma once

#include <cstddef>
#include <exception>
#include <mutex>

#include <omp.h>

namespace rmtlab {

/// kSerial is the reference path; kOpenMP must produce bitwise-identical
/// results for any loop whose iterations write disjoint slots.
enum class Execution { kSerial, kOpenMP };

/// Calls f(i) for i in [0, count). The first exception thrown by any
/// iteration is rethrown after the loop.
template <class F>
void for_each_index(std::size_t count, F&& f, Execution exec = Execution::kOpenMP) {
  if (exec == Execution::kSerial) {
    for (std::size_t i = 0; i < count; ++i) f(i);
    return;
  }
  std::exception_ptr error;
  std::mutex error_mutex;
  const auto n = static_cast<long long>(count);
#pragma omp parallel for schedule(dynamic, 4)
  for (long long i = 0; i < n; ++i) {
    try {
      f(static_cast<std::size_t>(i));
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mutex);
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
}

/// Sets the OpenMP team size; n <= 0 keeps the runtime default.
inline void set_worker_count(int n) {
  if (n > 0) omp_set_num_threads(n);
}

inline int worker_count() { return omp_get_max_threads(); }

}  // namespace rmtlab
