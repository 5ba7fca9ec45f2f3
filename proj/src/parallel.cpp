#include "ghostproj/parallel.hpp"

#include <atomic>
#include <thread>
#include <vector>

namespace ghostproj {

namespace {
std::atomic<int> g_threads{0};
}

void set_thread_count(int n)
{
    g_threads.store(n < 0 ? 0 : n);
}

int thread_count()
{
    const int n = g_threads.load();
    if (n > 0)
        return n;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

void for_each_block(std::uint64_t total, std::uint64_t block_size,
                    const std::function<void(std::uint64_t, std::uint64_t, std::uint64_t)>& fn)
{
    if (total == 0)
        return;
    if (block_size == 0)
        block_size = 1;
    const std::uint64_t blocks = (total + block_size - 1) / block_size;
    const int workers = static_cast<int>(
        std::min<std::uint64_t>(blocks, static_cast<std::uint64_t>(thread_count())));

    if (workers <= 1) {
        for (std::uint64_t b = 0; b < blocks; ++b)
            fn(b, b * block_size, std::min(total, (b + 1) * block_size));
        return;
    }

    std::atomic<std::uint64_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::uint64_t b = next.fetch_add(1);
            if (b >= blocks)
                return;
            fn(b, b * block_size, std::min(total, (b + 1) * block_size));
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers) - 1);
    for (int t = 1; t < workers; ++t)
        pool.emplace_back(worker);
    worker();
    for (auto& th : pool)
        th.join();
}

} // namespace ghostproj
