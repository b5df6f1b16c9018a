#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <thread>
#include <vector>

namespace wdim::par {

inline int clamp_threads(int n) { return n < 1 ? 1 : (n > 256 ? 256 : n); }

inline int& thread_count_storage() {
    static int count = [] {
        if (const char* env = std::getenv("WDIM_THREADS")) {
            int v = std::atoi(env);
            if (v >= 1) return clamp_threads(v);
        }
        unsigned hc = std::thread::hardware_concurrency();
        return clamp_threads(hc == 0 ? 1 : static_cast<int>(hc));
    }();
    return count;
}

inline int thread_count() { return thread_count_storage(); }
inline void set_thread_count(int n) { thread_count_storage() = clamp_threads(n); }

/// Splits [0, n) into fixed-size chunks and runs fn(begin, end) -> T on a
/// worker pool. Chunk boundaries depend only on `chunk`, never on the worker
/// count, so the per-chunk results (and any fold over them in index order)
/// are bit-identical however many threads run.
template <typename T, typename ChunkFn>
std::vector<T> map_chunks(std::uint64_t n, std::uint64_t chunk, ChunkFn fn) {
    if (chunk == 0) chunk = 1;
    const std::uint64_t num_chunks = n == 0 ? 0 : (n + chunk - 1) / chunk;
    std::vector<T> results(num_chunks);
    const int workers = thread_count();
    if (workers <= 1 || num_chunks <= 1) {
        for (std::uint64_t c = 0; c < num_chunks; ++c)
            results[c] = fn(c * chunk, std::min<std::uint64_t>(n, (c + 1) * chunk));
        return results;
    }
    std::atomic<std::uint64_t> next{0};
    std::exception_ptr error;
    std::atomic<bool> failed{false};
    auto work = [&] {
        for (;;) {
            std::uint64_t c = next.fetch_add(1);
            if (c >= num_chunks || failed.load()) break;
            try {
                results[c] = fn(c * chunk, std::min<std::uint64_t>(n, (c + 1) * chunk));
            } catch (...) {
                if (!failed.exchange(true)) error = std::current_exception();
                break;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(workers - 1));
    for (int i = 0; i < workers - 1; ++i) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    if (failed.load()) std::rethrow_exception(error);
    return results;
}

inline constexpr std::uint64_t default_chunk = 8192;

/// Count of indices satisfying a predicate (order-free integer reduction).
template <typename PerIndex>
std::uint64_t count_samples(std::uint64_t n, PerIndex pred) {
    auto partial = map_chunks<std::uint64_t>(n, default_chunk,
        [&](std::uint64_t b, std::uint64_t e) {
            std::uint64_t c = 0;
            for (std::uint64_t i = b; i < e; ++i) c += pred(i) ? 1 : 0;
            return c;
        });
    std::uint64_t total = 0;
    for (auto c : partial) total += c;
    return total;
}

/// Sum of a per-index value; chunk partials are folded in index order so the
/// result does not depend on thread scheduling.
template <typename PerIndex>
double sum_samples(std::uint64_t n, PerIndex value) {
    auto partial = map_chunks<double>(n, default_chunk,
        [&](std::uint64_t b, std::uint64_t e) {
            double s = 0.0;
            for (std::uint64_t i = b; i < e; ++i) s += value(i);
            return s;
        });
    double total = 0.0;
    for (double s : partial) total += s;
    return total;
}

}  // namespace wdim::par
