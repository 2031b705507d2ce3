#pragma once

#include <atomic>
#include <cstdint>
#include <exception>

namespace ifeq {

/// Serial is the reference path; Parallel runs the node loops under OpenMP
/// (and degrades to the serial loop when built without it). Kernels write
/// one output slot per index and use no reductions, so both policies produce
/// bit-identical results.
enum class ExecPolicy { Serial, Parallel };

namespace detail {

template <class Body>
void parallel_for(ExecPolicy exec, std::int64_t n, const Body& body) {
#ifdef _OPENMP
  if (exec == ExecPolicy::Parallel) {
    std::exception_ptr error = nullptr;
    std::atomic<bool> failed{false};
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
      if (failed.load(std::memory_order_relaxed)) continue;
      try {
        body(i);
      } catch (...) {
#pragma omp critical(ifeq_parallel_for_error)
        {
          if (!failed.exchange(true)) error = std::current_exception();
        }
      }
    }
    if (error) std::rethrow_exception(error);
    return;
  }
#else
  (void)exec;
#endif
  for (std::int64_t i = 0; i < n; ++i) body(i);
}

}  // namespace detail

}  // namespace ifeq
