// parallel.hpp: fixed-size worker pool over an index range; results land at
// their index so output order never depends on scheduling.

#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace qrs {

inline unsigned default_workers() { return std::max(1u, std::thread::hardware_concurrency()); }

/// out[i] = fn(i) for i in [0, n). The first exception thrown by any job is
/// rethrown after all workers stop.
template <class R, class Fn>
std::vector<R> parallel_map(std::size_t n, unsigned workers, Fn&& fn) {
    std::vector<R> out(n);
    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
    std::atomic<std::size_t> next{0};
    std::atomic<bool> stop{false};
    std::exception_ptr first;
    std::mutex m;
    auto work = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n || stop.load()) return;
            try {
                out[i] = fn(i);
            } catch (...) {
                std::lock_guard lock(m);
                if (!first) first = std::current_exception();
                stop = true;
            }
        }
    };
    if (workers == 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    }
    if (first) std::rethrow_exception(first);
    return out;
}

/// Rough peak bytes of one ED job: the dense matrix and its eigenvectors below
/// dense_limit, otherwise the Krylov basis plus the sparse Hamiltonian.
inline std::size_t ed_job_bytes(std::int64_t dim, int krylov_dim, std::int64_t dense_limit) {
    const auto d = static_cast<std::size_t>(dim);
    if (dim <= dense_limit) return 3 * d * d * 16;
    return d * 16 * static_cast<std::size_t>(krylov_dim + 8) + d * 40 * 20;
}

}  // namespace qrs
