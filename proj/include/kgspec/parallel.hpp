#pragma once

#include <exception>

namespace kgspec {

enum class ExecutionPolicy { Serial, Parallel };

/// Runs fn(i) for i in [0, n). Each index writes only its own slot, so the
/// result does not depend on the schedule. The lowest failing index wins.
template <class Fn>
void for_each_index(long n, ExecutionPolicy policy, Fn&& fn) {
  if (policy == ExecutionPolicy::Serial) {
    for (long i = 0; i < n; ++i) fn(i);
    return;
  }
  std::exception_ptr err;
  long err_index = n;
#pragma omp parallel for schedule(dynamic, 1)
  for (long i = 0; i < n; ++i) {
    try {
      fn(i);
    } catch (...) {
#pragma omp critical(kgspec_for_each_error)
      {
        if (i < err_index) {
          err_index = i;
          err = std::current_exception();
        }
      }
    }
  }
  if (err) std::rethrow_exception(err);
}

}  // namespace kgspec
