#pragma once
#include <cstdio>
#include <functional>
#include <string>

namespace l2morse {

// Shortest round-trip decimal form (17 significant digits) used by every file
// the tools emit, so reruns are byte-identical.
inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// Number of worker threads: L2MORSE_THREADS (unset or 0 = hardware
// concurrency, 1 = serial).
int worker_threads();

// Runs fn(i) for i in [0, n). Work items write into preallocated slots keyed
// by i, so the result is independent of the thread schedule.
void parallel_for(int n, const std::function<void(int)>& fn);

} // namespace l2morse
