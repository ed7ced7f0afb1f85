#include "l2morse/util.hpp"

#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace l2morse {

int worker_threads() {
    const char* env = std::getenv("L2MORSE_THREADS");
    long n = 0;
    if (env && *env) n = std::strtol(env, nullptr, 10);
    if (n <= 0) n = static_cast<long>(std::thread::hardware_concurrency());
    if (n < 1) n = 1;
    return static_cast<int>(n);
}

void parallel_for(int n, const std::function<void(int)>& fn) {
    if (n <= 0) return;
    int workers = worker_threads();
    if (workers > n) workers = n;
    if (workers == 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                int i = next.fetch_add(1, std::memory_order_relaxed);
                if (i >= n) return;
                fn(i);
            }
        });
    }
    for (auto& t : pool) t.join();
}

} // namespace l2morse
