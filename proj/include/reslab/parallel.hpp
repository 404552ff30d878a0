#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace reslab::parallel {

// Runs worker(begin, end) over fixed-size index segments handed out by an
// atomic counter. Results written per-index (or reduced per-segment in index
// order) are identical for any thread count.
template <class Worker>
void for_each_segment(size_t count, size_t segment, unsigned threads, Worker&& worker) {
    if (count == 0) return;
    const size_t n_seg = (count + segment - 1) / segment;
    unsigned t = threads == 0 ? 1u : threads;
    t = static_cast<unsigned>(std::min<size_t>(t, n_seg));
    if (t <= 1) {
        for (size_t s = 0; s < n_seg; ++s)
            worker(s * segment, std::min(count, (s + 1) * segment));
        return;
    }
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(t);
    std::exception_ptr err;
    std::atomic<bool> failed{false};
    std::mutex err_mu;
    for (unsigned i = 0; i < t; ++i) {
        pool.emplace_back([&] {
            try {
                for (;;) {
                    size_t s = next.fetch_add(1);
                    if (s >= n_seg || failed.load()) break;
                    worker(s * segment, std::min(count, (s + 1) * segment));
                }
            } catch (...) {
                std::scoped_lock lk(err_mu);
                if (!failed.exchange(true)) err = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    if (failed.load()) std::rethrow_exception(err);
}

// Deterministic reduction: per-segment partial sums combined in index order.
template <class Term>
double sum_by_segments(size_t count, size_t segment, unsigned threads, Term&& term) {
    if (count == 0) return 0.0;
    const size_t n_seg = (count + segment - 1) / segment;
    std::vector<double> partial(n_seg, 0.0);
    for_each_segment(count, segment, threads, [&](size_t lo, size_t hi) {
        double s = 0.0;
        for (size_t i = lo; i < hi; ++i) s += term(i);
        partial[lo / segment] = s;
    });
    double total = 0.0;
    for (double p : partial) total += p;
    return total;
}

}  // namespace reslab::parallel
