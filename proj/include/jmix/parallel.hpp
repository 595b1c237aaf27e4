#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace jmix {

inline constexpr const char* thread_env_var = "JMIX_THREADS";

// Worker count: JMIX_THREADS if set to a positive integer, else the hardware
// concurrency (at least one).
[[nodiscard]] inline unsigned thread_count() {
    if (const char* env = std::getenv(thread_env_var)) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(std::min<long>(v, 256));
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

// Runs fn(i) for i in [0, n). Work is split into contiguous blocks, so the
// result of each index never depends on the thread count. The first exception
// (lowest block) is rethrown after all workers join.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn, unsigned threads = thread_count()) {
    if (n == 0) return;
    const std::size_t workers = std::min<std::size_t>(threads, n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const std::size_t block = (n + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                const std::size_t lo = w * block, hi = std::min(n, lo + block);
                for (std::size_t i = lo; i < hi; ++i) fn(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

} // namespace jmix
