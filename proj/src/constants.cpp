#include "divcorr/constants.hpp"

#include "divcorr/exact.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>

namespace divcorr {

namespace {

struct PrimeCache {
    std::mutex lock;
    std::uint64_t covered = 0;
    std::shared_ptr<const std::vector<std::uint32_t>> primes;
};

PrimeCache &prime_cache()
{
    static PrimeCache cache;
    return cache;
}

std::vector<std::uint32_t> eratosthenes(std::uint64_t limit)
{
    std::vector<std::uint8_t> composite(limit + 1, 0);
    std::vector<std::uint32_t> out;
    for (std::uint64_t i = 2; i <= limit; ++i) {
        if (composite[i])
            continue;
        out.push_back(static_cast<std::uint32_t>(i));
        for (std::uint64_t m = i * i; m <= limit; m += i)
            composite[m] = 1;
    }
    return out;
}

/// E₁(x) = ∫_x^∞ e^{−t}/t dt.
double exp_integral_e1(double x) { return -std::expint(-x); }

} // namespace

std::shared_ptr<const std::vector<std::uint32_t>> primes_up_to(std::uint64_t limit)
{
    if (limit >= (std::uint64_t{1} << 32))
        throw capacity_error("primes_up_to: limit must stay below 2^32");
    auto &cache = prime_cache();
    std::lock_guard guard(cache.lock);
    if (cache.primes && cache.covered >= limit)
        return cache.primes;
    const std::uint64_t target = std::max<std::uint64_t>(limit, 1'000'000);
    cache.primes = std::make_shared<const std::vector<std::uint32_t>>(eratosthenes(target));
    cache.covered = target;
    return cache.primes;
}

TruncatedConstant prime_log_sum(const std::function<double(std::uint64_t)> &g, std::uint64_t p_cut)
{
    if (p_cut < 100)
        throw std::invalid_argument("prime_log_sum: p_cut must be at least 100");
    const auto primes = primes_up_to(p_cut);
    CompensatedSum s;
    for (const auto p : *primes) {
        if (p > p_cut)
            break;
        s += g(p);
    }
    const double P = static_cast<double>(p_cut);
    const double half = std::floor(P / 2);
    const double c_top = g(p_cut) * P * P / std::log(P);
    const double c_mid = g(static_cast<std::uint64_t>(half)) * half * half / std::log(half);
    const double K = 2.0 * std::max(std::abs(c_top), std::abs(c_mid));
    TruncatedConstant out;
    out.p_cut = p_cut;
    out.value = s.value() + c_top / P;
    out.tail_bound = K * (std::log(P) + 1.0) / P;
    return out;
}

TruncatedConstant prime_euler_product(const std::function<double(std::uint64_t)> &f, std::uint64_t p_cut,
                                      std::uint64_t first_prime)
{
    if (p_cut < 100)
        throw std::invalid_argument("prime_euler_product: p_cut must be at least 100");
    const auto primes = primes_up_to(p_cut);
    long double prod = 1.0L;
    for (const auto p : *primes) {
        if (p > p_cut)
            break;
        if (p < first_prime)
            continue;
        prod *= static_cast<long double>(f(p));
    }
    const double P = static_cast<double>(p_cut);
    const double half = std::floor(P / 2);
    const double b_top = std::log(f(p_cut)) * P * P;
    const double b_mid = std::log(f(static_cast<std::uint64_t>(half))) * half * half;
    const double K = 2.0 * std::max(std::abs(b_top), std::abs(b_mid));
    TruncatedConstant out;
    out.p_cut = p_cut;
    out.value = static_cast<double>(prod) * std::exp(b_top * exp_integral_e1(std::log(P)));
    out.tail_bound = std::expm1(K / P);
    return out;
}

TruncatedConstant hildebrand_prime_sum(std::uint64_t p_cut)
{
    return prime_log_sum(
        [](std::uint64_t p) {
            const double x = static_cast<double>(p);
            return std::log(x) / (x * (x - 1.0));
        },
        p_cut);
}

__int128 Polynomial::eval(std::int64_t x) const
{
    __int128 acc = 0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it)
        acc = acc * x + *it;
    return acc;
}

namespace {

long double ratio(__int128 num, __int128 den)
{
    return static_cast<long double>(num) / static_cast<long double>(den);
}

void check_pair(const Polynomial &p1, const Polynomial &p2)
{
    if (!p1.monic() || !p2.monic())
        throw std::invalid_argument("polynomial pair: both polynomials must be monic");
    if (p2.degree() != p1.degree() + 1)
        throw std::invalid_argument("polynomial pair: deg P2 must equal 1 + deg P1");
    if (p2.degree() > 4)
        throw std::invalid_argument("polynomial pair: degree above 4 is not supported");
}

} // namespace

PolyPairConstants poly_pair_constants(const Polynomial &p1, const Polynomial &p2, std::uint64_t p_cut)
{
    check_pair(p1, p2);
    using Key = std::tuple<std::vector<std::int64_t>, std::vector<std::int64_t>, std::uint64_t>;
    static std::mutex lock;
    static std::map<Key, PolyPairConstants> memo;
    const Key key{p1.coeffs, p2.coeffs, p_cut};
    {
        std::lock_guard guard(lock);
        if (auto it = memo.find(key); it != memo.end())
            return it->second;
    }

    const auto primes = primes_up_to(p_cut);
    for (const auto p : *primes) {
        if (p > p_cut)
            break;
        if (p2.eval(p) == 0 || p1.eval(p) + p2.eval(p) == 0)
            throw std::domain_error("polynomial pair: P2(p) or P1(p)+P2(p) vanishes at p=" + std::to_string(p));
    }
    auto euler_factor = [&](std::uint64_t p) {
        const auto x = static_cast<std::int64_t>(p);
        const __int128 a = p1.eval(x), b = p2.eval(x);
        return static_cast<double>(1.0L + ratio((x - 1) * a - b, x * b));
    };
    auto log_term = [&](std::uint64_t p) {
        const auto x = static_cast<std::int64_t>(p);
        const __int128 a = p1.eval(x), b = p2.eval(x);
        return static_cast<double>(ratio(b - (x - 2) * a, (x - 1) * (a + b)) *
                                   std::log(static_cast<long double>(x)));
    };
    PolyPairConstants out{prime_euler_product(euler_factor, p_cut), prime_log_sum(log_term, p_cut)};
    std::lock_guard guard(lock);
    memo.emplace(key, out);
    return out;
}

double poly_pair_main_term(const Polynomial &p1, const Polynomial &p2, std::uint64_t k, double x,
                           std::uint64_t p_cut)
{
    if (k == 0)
        throw std::invalid_argument("poly_pair_main_term: k must be positive");
    const auto c = poly_pair_constants(p1, p2, p_cut);
    long double local = 1.0L;
    long double extra = 0.0L;
    for (const auto p : prime_divisors(static_cast<std::int64_t>(k))) {
        const auto q = static_cast<std::int64_t>(p);
        const __int128 a = p1.eval(q), b = p2.eval(q);
        local *= ratio(b, a + b);
        extra += ratio(a, a + b) * std::log(static_cast<long double>(q));
    }
    const long double bracket = std::log(static_cast<long double>(x)) + kEulerGamma + c.log_sum.value + extra;
    return static_cast<double>(static_cast<long double>(c.euler.value) * local * bracket);
}

} // namespace divcorr
