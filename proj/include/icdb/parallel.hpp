#pragma once

#include <cstddef>
#include <functional>

namespace icdb {

// Calls fn(i) for every i in [0, n) on an OpenMP team of `workers` threads
// (dynamic schedule). The first exception raised by any call is rethrown
// after the team joins. Throws DomainError when workers < 1.
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn);

int hardware_workers();

}  // namespace icdb
