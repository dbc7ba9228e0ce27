#pragma once

#include <cstddef>
#include <exception>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace envcalc {

/// Serial is the reference path; Parallel fans out with OpenMP when built in.
enum class Execution { Serial, Parallel };

/// Evaluates fn(i) for i in [0, n) and returns results in index order, so
/// the output never depends on scheduling. The first exception (lowest
/// index) is rethrown after the loop.
template <class Result, class Fn>
std::vector<Result> map_indexed(std::size_t n, Fn&& fn, Execution ex = Execution::Parallel) {
  std::vector<Result> out(n);
  if (ex == Execution::Serial || n < 2) {
    for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
    return out;
  }
  std::vector<std::exception_ptr> errors(n);
  const auto count = static_cast<long long>(n);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
  for (long long i = 0; i < count; ++i) {
    try {
      out[static_cast<std::size_t>(i)] = fn(static_cast<std::size_t>(i));
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

[[nodiscard]] inline int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace envcalc
