#include "icdb/parallel.hpp"

#include <omp.h>

#include <exception>
#include <mutex>

#include "icdb/error.hpp"

namespace icdb {

void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn) {
  if (workers < 1) throw DomainError("worker count must be at least 1");
  std::exception_ptr failure;
  std::mutex failure_mu;
  const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for num_threads(workers) schedule(dynamic, 16)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    try {
      fn(static_cast<std::size_t>(i));
    } catch (...) {
      std::lock_guard lock(failure_mu);
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

int hardware_workers() { return omp_get_num_procs(); }

}  // namespace icdb
