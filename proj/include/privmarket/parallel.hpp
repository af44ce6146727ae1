#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace pm {

// Static fan-out of independent trials over worker threads. Each index is
// processed exactly once and must write only to its own slot; results are
// then reducible in index order, so the outcome is identical to a sequential
// run regardless of scheduling.
template <class Fn>
void parallel_for_index(std::size_t count, Fn&& fn) {
    const std::size_t hw = std::thread::hardware_concurrency();
    const std::size_t workers =
        std::clamp<std::size_t>(hw == 0 ? 1 : hw, 1, std::max<std::size_t>(count, 1));
    if (workers <= 1 || count < 2) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < count; i += workers) fn(i);
        });
    }
    for (std::thread& t : pool) t.join();
}

}  // namespace pm
