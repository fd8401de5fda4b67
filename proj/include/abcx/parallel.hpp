#pragma once

#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace abcx {

// Splits [0, total) into at most `threads` contiguous chunks and runs
// fn(begin, end, chunk_index) on each. Results must be merged by the caller
// in chunk order; chunk boundaries depend only on (total, threads), never on
// scheduling, so deterministic work stays deterministic.
inline void parallel_chunks(std::size_t total, int threads,
                            const std::function<void(std::size_t, std::size_t, std::size_t)>& fn) {
    if (threads <= 1 || total <= 1) {
        if (total > 0) fn(0, total, 0);
        return;
    }
    std::size_t nchunks = static_cast<std::size_t>(threads);
    if (nchunks > total) nchunks = total;
    std::size_t base = total / nchunks;
    std::size_t extra = total % nchunks;
    std::vector<std::thread> workers;
    workers.reserve(nchunks);
    std::size_t begin = 0;
    for (std::size_t c = 0; c < nchunks; ++c) {
        std::size_t len = base + (c < extra ? 1 : 0);
        std::size_t end = begin + len;
        workers.emplace_back([&fn, begin, end, c] { fn(begin, end, c); });
        begin = end;
    }
    for (auto& w : workers) w.join();
}

}  // namespace abcx
