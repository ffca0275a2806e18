#pragma once

#include <atomic>
#include <exception>
#include <thread>
#include <vector>

namespace lgdkit {

/// Runs fn(i) for i in [0, n). With jobs > 1 the items are pulled from a
/// shared counter by worker threads; callers keep determinism by writing
/// only to slot i. The first exception is rethrown after all workers stop.
template <typename Fn>
void parallel_for(int n, int jobs, Fn&& fn) {
    if (n <= 0) return;
    if (jobs > n) jobs = n;
    if (jobs <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr first_error = nullptr;
    std::atomic<bool> failed{false};
    std::vector<std::thread> workers;
    workers.reserve(jobs);
    for (int t = 0; t < jobs; ++t) {
        workers.emplace_back([&] {
            int i;
            while ((i = next.fetch_add(1)) < n) {
                if (failed.load()) return;
                try {
                    fn(i);
                } catch (...) {
                    if (!failed.exchange(true)) first_error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& w : workers) w.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace lgdkit
