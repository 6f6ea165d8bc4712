#pragma once

#include <cstddef>
#include <functional>

namespace occorbit {

// Worker count: hardware concurrency capped by OCCLUSION_ORBIT_THREADS.
unsigned worker_count();

// Runs body(i) for i in [0, n). Each index is visited exactly once; bodies
// must only write to state owned by their index.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace occorbit
