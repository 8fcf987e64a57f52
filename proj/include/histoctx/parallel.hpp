#pragma once

#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace histoctx {

// Runs fn(i) for i in [0, n). Work items must write only to their own output
// slot so results do not depend on the worker count.
template <typename Fn>
void parallel_for(int n, int workers, Fn&& fn) {
    if (workers <= 1 || n <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    int k = std::min(workers, n);
    std::vector<std::thread> threads;
    threads.reserve(k);
    for (int t = 0; t < k; ++t) {
        threads.emplace_back([&] {
            for (;;) {
                int i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error) error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& th : threads) th.join();
    if (error) std::rethrow_exception(error);
}

} // namespace histoctx
