#pragma once

#include <functional>

namespace sqp {

// Worker cap from SCHATTEN_QP_THREADS (0 or unset = hardware concurrency).
int worker_count();

// Calls body(i) for i in [0, n). Runs serially when nested inside another parallel_for or
// when only one worker is available. The first exception (lowest index) is rethrown.
void parallel_for(int n, const std::function<void(int)>& body);

}  // namespace sqp
