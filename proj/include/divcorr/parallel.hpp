#pragma once

#include "divcorr/exact.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>
#include <vector>

namespace divcorr::parallel {

/// Block length used to partition every range reduction. The partition is a
/// function of the range alone, never of the thread count, so block sums and
/// their ordered merge are bit-identical for any number of workers.
inline constexpr std::int64_t kBlock = 1 << 15;

void set_thread_count(unsigned n);
unsigned thread_count();

/// Runs body(block_index) for block_index in [0, blocks) on the worker pool.
void for_each_block(std::int64_t blocks, const std::function<void(std::int64_t)> &body);

/// Σ_{n=first}^{last} term(n), compensated per block, blocks merged in order.
template <class Term>
double ordered_sum(std::int64_t first, std::int64_t last, Term &&term)
{
    if (last < first)
        return 0.0;
    const std::int64_t len = last - first + 1;
    const std::int64_t blocks = (len + kBlock - 1) / kBlock;
    std::vector<CompensatedSum> partial(static_cast<std::size_t>(blocks));
    for_each_block(blocks, [&](std::int64_t b) {
        const std::int64_t lo = first + b * kBlock;
        const std::int64_t hi = std::min(last, lo + kBlock - 1);
        CompensatedSum s;
        for (std::int64_t n = lo; n <= hi; ++n)
            s += term(n);
        partial[static_cast<std::size_t>(b)] = s;
    });
    CompensatedSum total;
    for (const auto &s : partial)
        total.merge(s);
    return total.value();
}

/// Same partitioning for several simultaneous sums (term writes into out[0..width)).
template <class Term>
std::vector<double> ordered_sums(std::int64_t first, std::int64_t last, std::size_t width, Term &&term)
{
    std::vector<double> result(width, 0.0);
    if (last < first)
        return result;
    const std::int64_t len = last - first + 1;
    const std::int64_t blocks = (len + kBlock - 1) / kBlock;
    std::vector<std::vector<CompensatedSum>> partial(static_cast<std::size_t>(blocks),
                                                     std::vector<CompensatedSum>(width));
    for_each_block(blocks, [&](std::int64_t b) {
        const std::int64_t lo = first + b * kBlock;
        const std::int64_t hi = std::min(last, lo + kBlock - 1);
        std::vector<double> buf(width);
        auto &acc = partial[static_cast<std::size_t>(b)];
        for (std::int64_t n = lo; n <= hi; ++n) {
            term(n, buf.data());
            for (std::size_t i = 0; i < width; ++i)
                acc[i] += buf[i];
        }
    });
    for (std::size_t i = 0; i < width; ++i) {
        CompensatedSum total;
        for (const auto &blk : partial)
            total.merge(blk[i]);
        result[i] = total.value();
    }
    return result;
}

} // namespace divcorr::parallel
