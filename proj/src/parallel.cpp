#include "persfit/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace persfit {

int num_threads() {
    int n = static_cast<int>(std::thread::hardware_concurrency());
    if (n <= 0)
        n = 1;
    if (const char *env = std::getenv("PERSFIT_THREADS")) {
        const int cap = std::atoi(env);
        if (cap > 0 && cap < n)
            n = cap;
    }
    return n;
}

namespace {
thread_local bool inside_parallel_region = false;
}

void parallel_for(std::int64_t n, const std::function<void(std::int64_t)> &fn) {
    const int workers = num_threads();
    if (n <= 0)
        return;
    // Nested regions run inline: the outer loop already owns the cores.
    if (workers <= 1 || n == 1 || inside_parallel_region) {
        for (std::int64_t i = 0; i < n; ++i)
            fn(i);
        return;
    }
    std::atomic<std::int64_t> next{0};
    auto body = [&]() {
        inside_parallel_region = true;
        for (;;) {
            const std::int64_t i = next.fetch_add(1);
            if (i >= n)
                return;
            fn(i);
        }
    };
    std::vector<std::thread> pool;
    const int spawn = static_cast<int>(std::min<std::int64_t>(workers, n)) - 1;
    pool.reserve(spawn);
    for (int t = 0; t < spawn; ++t)
        pool.emplace_back(body);
    body();
    inside_parallel_region = false;
    for (auto &t : pool)
        t.join();
}

} // namespace persfit
