#pragma once

#include <cstddef>
#include <future>
#include <vector>

namespace parttrack {

// Runs fn(begin, end) over contiguous chunks of [0, n). Callers that need a
// deterministic result must make fn's output independent of chunk boundaries
// (pure per-index work, or reductions over a total order).
template <typename Fn>
void parallel_chunks(std::size_t n, int threads, Fn&& fn) {
    if (n == 0) return;
    const std::size_t workers =
        threads <= 1 ? 1 : std::min<std::size_t>(static_cast<std::size_t>(threads), n);
    if (workers == 1) {
        fn(std::size_t{0}, n);
        return;
    }
    const std::size_t chunk = (n + workers - 1) / workers;
    std::vector<std::future<void>> futures;
    for (std::size_t begin = 0; begin < n; begin += chunk) {
        const std::size_t end = std::min(n, begin + chunk);
        futures.push_back(std::async(std::launch::async,
                                     [&fn, begin, end] { fn(begin, end); }));
    }
    for (auto& f : futures) f.get();
}

}  // namespace parttrack
