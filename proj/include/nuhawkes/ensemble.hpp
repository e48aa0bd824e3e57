#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <type_traits>
#include <vector>

namespace nuhawkes {

/// Runs fn(0..count-1) on up to `threads` workers and returns the results in
/// index order. Each index must carry its own RNG stream; the output then
/// does not depend on the thread count.
template <class Fn>
auto run_ensemble(std::size_t count, unsigned threads, Fn&& fn) {
    using Result = std::decay_t<std::invoke_result_t<Fn&, std::size_t>>;
    std::vector<Result> results(count);
    const unsigned workers =
        std::max(1u, std::min<unsigned>(threads == 0 ? 1u : threads, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
    if (workers == 1) {
        for (std::size_t i = 0; i < count; ++i) {
            results[i] = fn(i);
        }
        return results;
    }
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            // strided assignment; which worker runs an index does not matter
            for (std::size_t i = w; i < count; i += workers) {
                try {
                    results[i] = fn(i);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) {
                        failure = std::current_exception();
                    }
                    return;
                }
            }
        });
    }
    for (auto& t : pool) {
        t.join();
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
    return results;
}

} // namespace nuhawkes
