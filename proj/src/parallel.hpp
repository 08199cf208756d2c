#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace bssplan::detail {

/// Runs body(i) for i in [0, n) on up to `jobs` threads. Every index runs even
/// if some throw; the exception of the lowest failing index is rethrown.
template <typename Body>
void parallel_for(std::size_t n, int jobs, Body&& body) {
    std::vector<std::exception_ptr> errors(n);
    auto run = [&](std::size_t i) {
        try {
            body(i);
        } catch (...) {
            errors[i] = std::current_exception();
        }
    };
    const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, jobs)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) run(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t k = 0; k < workers; ++k)
            pool.emplace_back([&] {
                for (std::size_t i; (i = next.fetch_add(1)) < n;) run(i);
            });
        for (auto& t : pool) t.join();
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

} // namespace bssplan::detail
