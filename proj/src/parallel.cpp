#include "divcorr/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>

namespace divcorr::parallel {

namespace {
std::atomic<unsigned> g_threads{1};
}

void set_thread_count(unsigned n) { g_threads = std::max(1u, n); }

unsigned thread_count() { return g_threads.load(); }

void for_each_block(std::int64_t blocks, const std::function<void(std::int64_t)> &body)
{
    const auto workers = static_cast<std::int64_t>(std::min<std::int64_t>(thread_count(), blocks));
    if (workers <= 1) {
        for (std::int64_t b = 0; b < blocks; ++b)
            body(b);
        return;
    }
    std::atomic<std::int64_t> next{0};
    std::exception_ptr error;
    std::atomic<bool> failed{false};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (std::int64_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const auto b = next.fetch_add(1);
                if (b >= blocks || failed)
                    return;
                try {
                    body(b);
                } catch (...) {
                    if (!failed.exchange(true))
                        error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto &t : pool)
        t.join();
    if (error)
        std::rethrow_exception(error);
}

} // namespace divcorr::parallel
