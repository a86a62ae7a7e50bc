#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace hashspread {

// Runs fn(begin, end) over disjoint chunks of [0, n). Callers get determinism
// by writing results into per-index slots.
template <typename Fn>
void parallel_for(std::size_t n, const Fn& fn, std::size_t min_grain = 256) {
    if (n == 0) return;
    std::size_t hw = std::max<std::size_t>(1, std::thread::hardware_concurrency());
    std::size_t chunks = std::min(hw, (n + min_grain - 1) / min_grain);
    if (chunks <= 1) {
        fn(std::size_t{0}, n);
        return;
    }
    std::vector<std::thread> workers;
    workers.reserve(chunks);
    std::size_t per = (n + chunks - 1) / chunks;
    for (std::size_t c = 0; c < chunks; ++c) {
        std::size_t begin = c * per;
        std::size_t end = std::min(n, begin + per);
        if (begin >= end) break;
        workers.emplace_back([&fn, begin, end] { fn(begin, end); });
    }
    for (auto& w : workers) w.join();
}

}  // namespace hashspread
