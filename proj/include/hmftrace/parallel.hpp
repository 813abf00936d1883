#pragma once

#include <cstddef>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace hmf {

/// Worker count: HMFTRACE_THREADS if set and positive, otherwise the hardware concurrency.
unsigned thread_count();

/// Evaluates f(i) for i in [0, count) and returns the results in index order.
/// Work is split into contiguous blocks; the output does not depend on scheduling.
template <class T, class F>
std::vector<T> parallel_map(std::size_t count, F&& f) {
    std::vector<T> out(count);
    const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(thread_count(), count));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) out[i] = f(i);
        return out;
    }
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                const std::size_t begin = count * w / workers;
                const std::size_t end = count * (w + 1) / workers;
                for (std::size_t i = begin; i < end; ++i) out[i] = f(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return out;
}

/// Pairwise (tree) sum in index order.
template <class T>
T pairwise_sum(const std::vector<T>& v, std::size_t begin, std::size_t end) {
    if (end <= begin) return T{};
    if (end - begin <= 8) {
        T s{};
        for (std::size_t i = begin; i < end; ++i) s += v[i];
        return s;
    }
    const std::size_t mid = begin + (end - begin) / 2;
    return pairwise_sum(v, begin, mid) + pairwise_sum(v, mid, end);
}

template <class T>
T pairwise_sum(const std::vector<T>& v) {
    return pairwise_sum(v, 0, v.size());
}

}  // namespace hmf
