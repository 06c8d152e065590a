#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace kolmocouple {

/// Process-wide worker count. Results of every parallel loop in this
/// project are identical for any value; this only controls speed.
void set_worker_count(int workers);
int worker_count();

/// Run `work(begin, end, chunk_index)` over [0, n) split into fixed-size
/// chunks. The chunk layout depends only on (n, chunk_size), never on the
/// worker count, so per-chunk outputs can be merged in chunk order to give
/// scheduling-independent results.
void parallel_chunks(std::size_t n, std::size_t chunk_size,
                     const std::function<void(std::size_t, std::size_t, std::size_t)>& work);

inline std::size_t chunk_count(std::size_t n, std::size_t chunk_size) {
    return (n + chunk_size - 1) / chunk_size;
}

/// Fixed-order pairwise summation; deterministic and more accurate than a
/// running sum for long arrays.
double pairwise_sum(std::span<const double> values);

}  // namespace kolmocouple
