#pragma once

#include <cstddef>
#include <functional>

namespace tmrc {

/// Worker count used by all internally parallel operations. 0 selects
/// std::thread::hardware_concurrency().
void set_thread_count(std::size_t n);
std::size_t thread_count();

/// Runs body(i) for i in [0, n). Work items must be independent; results are
/// identical to a serial loop. If any item throws, the exception from the
/// lowest failing index is rethrown after all workers stop.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace tmrc
