#pragma once

#include "driftflow/common.hpp"

#include <algorithm>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace driftflow {

// Runs fn(i) for i in [0, count). With a thread budget above 1 the index
// range is split into contiguous chunks, one thread per chunk. Each call must
// write only to its own output slot; under that discipline the results are
// identical for every thread count, so reproducibility does not depend on
// DRIFTFLOW_THREADS.
template <typename Fn>
void parallel_for(int count, Fn&& fn) {
    const int threads = std::min(thread_budget(), count);
    if (threads <= 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(static_cast<size_t>(threads));
    const int chunk = (count + threads - 1) / threads;
    for (int w = 0; w < threads; ++w) {
        const int lo = w * chunk;
        const int hi = std::min(count, lo + chunk);
        pool.emplace_back([&, lo, hi, w] {
            try {
                for (int i = lo; i < hi; ++i) fn(i);
            } catch (...) {
                errors[static_cast<size_t>(w)] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

} // namespace driftflow
