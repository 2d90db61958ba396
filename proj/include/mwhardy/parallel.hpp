#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <span>
#include <thread>
#include <vector>

namespace mwhardy {

/// Worker count used by data-parallel loops. 0 selects hardware concurrency.
void set_thread_count(unsigned threads);
unsigned thread_count();

/// Runs body(i) for i in [0, count). Each index is visited exactly once and
/// bodies must only write to state owned by their index, so results do not
/// depend on the worker count.
template <class Body>
void parallel_for(std::size_t count, Body&& body) {
    const unsigned workers = thread_count();
    if (workers <= 1 || count < 64) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    const std::size_t chunks = std::min<std::size_t>(workers, count);
    // the first failing chunk's exception is rethrown, matching the serial order
    std::vector<std::exception_ptr> errors(chunks);
    {
        std::vector<std::jthread> pool;
        pool.reserve(chunks);
        for (std::size_t c = 0; c < chunks; ++c) {
            const std::size_t lo = count * c / chunks;
            const std::size_t hi = count * (c + 1) / chunks;
            pool.emplace_back([lo, hi, c, &body, &errors] {
                try {
                    for (std::size_t i = lo; i < hi; ++i) body(i);
                } catch (...) {
                    errors[c] = std::current_exception();
                }
            });
        }
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

/// Pairwise (tree) summation; the association order depends only on the
/// length of the input.
double pairwise_sum(std::span<const double> values);

} // namespace mwhardy
