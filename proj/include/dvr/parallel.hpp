#pragma once

#include <cstddef>
#include <functional>

namespace dvr {

/// Worker count used by parallel_for. 0 selects hardware concurrency.
void set_thread_count(unsigned threads);
unsigned thread_count();

/// Runs body(i) for i in [0, n). Each index is processed exactly once; callers
/// write results into per-index slots so output never depends on scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace dvr
