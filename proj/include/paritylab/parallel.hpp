#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace paritylab {

// Worker count: PARITYLAB_THREADS if set and positive, else the hardware concurrency.
inline unsigned worker_count() {
    if (const char* env = std::getenv("PARITYLAB_THREADS")) {
        try {
            const int n = std::stoi(env);
            if (n > 0) return static_cast<unsigned>(n);
        } catch (const std::exception&) {
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

// out[i] = fn(in[i]); results land in input order whatever the completion order.
template <typename In, typename Fn>
auto parallel_map(const std::vector<In>& inputs, Fn fn) -> std::vector<decltype(fn(inputs.front()))> {
    using Out = decltype(fn(inputs.front()));
    std::vector<Out> results(inputs.size());
    const unsigned workers = std::min<unsigned>(worker_count(), static_cast<unsigned>(inputs.size()));
    if (workers <= 1) {
        for (std::size_t i = 0; i < inputs.size(); ++i) results[i] = fn(inputs[i]);
        return results;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto work = [&] {
        for (std::size_t i = next++; i < inputs.size(); i = next++) {
            try {
                results[i] = fn(inputs[i]);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    pool.clear();
    if (failure) std::rethrow_exception(failure);
    return results;
}

}  // namespace paritylab
