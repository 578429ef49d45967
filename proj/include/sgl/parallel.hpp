#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace sgl {

// Runs body(i) for i in [begin, end). Each index is processed exactly once and
// results must be written to per-index slots, so output is thread-count independent.
template <class F>
void parallel_for(int begin, int end, int threads, F&& body) {
    const int n = end - begin;
    if (n <= 0) return;
    if (threads <= 0) threads = int(std::max(1u, std::thread::hardware_concurrency()));
    threads = std::min(threads, n);
    if (threads == 1) {
        for (int i = begin; i < end; ++i) body(i);
        return;
    }
    std::atomic<int> next{begin};
    std::exception_ptr err;
    std::mutex mu;
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (;;) {
                const int i = next.fetch_add(1);
                if (i >= end) return;
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(mu);
                    if (!err) err = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
}

}  // namespace sgl
