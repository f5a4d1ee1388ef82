#pragma once
#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace rwre {

// Runs fn(i) for i in [0, n) across worker threads, each result slot owned
// by its index. Callers fold the results in index order afterwards, so the
// outcome never depends on scheduling. The first task exception is rethrown
// after all workers join.
template <typename Fn>
void parallel_for_indexed(size_t n, Fn&& fn, unsigned workers = 0) {
    if (workers == 0) workers = std::thread::hardware_concurrency();
    if (workers <= 1 || n <= 1) {
        for (size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::exception_ptr> errors(n);
    std::vector<std::thread> pool;
    std::atomic<size_t> next{0};
    for (unsigned w = 0; w < workers && w < n; ++w) {
        pool.emplace_back([&] {
            for (size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
                try {
                    fn(i);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

} // namespace rwre
