#include "kolmocouple/parallel.hpp"

#include <atomic>
#include <thread>

namespace kolmocouple {

namespace {
std::atomic<int> g_workers{0};  // 0 = use hardware concurrency
}

void set_worker_count(int workers) { g_workers.store(workers > 0 ? workers : 0); }

int worker_count() {
    int w = g_workers.load();
    if (w > 0) return w;
    unsigned hc = std::thread::hardware_concurrency();
    return hc > 0 ? static_cast<int>(hc) : 1;
}

void parallel_chunks(std::size_t n, std::size_t chunk_size,
                     const std::function<void(std::size_t, std::size_t, std::size_t)>& work) {
    if (n == 0) return;
    if (chunk_size == 0) chunk_size = 1;
    const std::size_t chunks = chunk_count(n, chunk_size);
    const int workers = worker_count();
    if (workers <= 1 || chunks <= 1) {
        for (std::size_t c = 0; c < chunks; ++c) {
            const std::size_t begin = c * chunk_size;
            work(begin, std::min(n, begin + chunk_size), c);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    auto runner = [&] {
        for (;;) {
            const std::size_t c = next.fetch_add(1);
            if (c >= chunks) return;
            const std::size_t begin = c * chunk_size;
            work(begin, std::min(n, begin + chunk_size), c);
        }
    };
    std::vector<std::thread> pool;
    const int spawned = static_cast<int>(std::min<std::size_t>(workers, chunks));
    pool.reserve(spawned);
    for (int t = 0; t < spawned; ++t) pool.emplace_back(runner);
    for (auto& th : pool) th.join();
}

double pairwise_sum(std::span<const double> values) {
    const std::size_t n = values.size();
    if (n == 0) return 0.0;
    if (n <= 8) {
        double s = 0.0;
        for (double v : values) s += v;
        return s;
    }
    const std::size_t half = n / 2;
    return pairwise_sum(values.subspan(0, half)) + pairwise_sum(values.subspan(half));
}

}  // namespace kolmocouple
