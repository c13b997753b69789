#pragma once

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace devcauchy {

/// Thread count from DEVCAUCHY_THREADS, 1 when unset or invalid.
inline int threads_from_env()
{
    const char* v = std::getenv("DEVCAUCHY_THREADS");
    if (!v) return 1;
    try {
        return std::max(1, std::stoi(v));
    } catch (...) {
        return 1;
    }
}

/// Runs fn(i) for i in [0, count). Work is split into contiguous blocks, so callers that
/// write results by index get identical output for every thread count. The first exception
/// (lowest index) is rethrown.
template <class Fn>
void parallel_for(std::size_t count, int threads, Fn&& fn)
{
    if (threads <= 1 || count < 2) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(threads), count);
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            const std::size_t begin = count * w / workers, end = count * (w + 1) / workers;
            for (std::size_t i = begin; i < end; ++i) {
                try {
                    fn(i);
                } catch (...) {
                    errors[w] = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    for (std::size_t w = 0; w < workers; ++w)
        if (errors[w]) std::rethrow_exception(errors[w]);
}

} // namespace devcauchy
