#include "divcorr/singular.hpp"

#include "divcorr/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

namespace divcorr {

namespace {

double exp_integral_e1(double x) { return -std::expint(-x); }

struct EulerTail {
    long double product = 1.0L;
    double tail_bound = 0.0;
};

/// Π_{first ≤ p ≤ P} f(p) times exp(b·E₁(log P)), b fitted from f(P) ≈ 1 + b/P².
/// The reported bound is expm1(c/P), c the majorant constant of |log f(p)|·p².
EulerTail euler_with_tail(const std::function<long double(std::uint64_t)> &f, std::uint64_t P,
                          std::uint64_t first, double c)
{
    const auto primes = primes_up_to(P);
    long double prod = 1.0L;
    for (const auto p : *primes) {
        if (p > P)
            break;
        if (p >= first)
            prod *= f(p);
    }
    const double Pd = static_cast<double>(P);
    const double b = static_cast<double>(std::log(f(P))) * Pd * Pd;
    EulerTail out;
    out.product = prod * std::exp(static_cast<long double>(b * exp_integral_e1(std::log(Pd))));
    out.tail_bound = std::expm1(c / Pd);
    return out;
}

long double c_factor(int n, std::uint64_t p)
{
    const auto x = static_cast<long double>(p);
    return 1.0L - static_cast<long double>(n - 1) / ((x - 1.0L) * (x - n + 1.0L));
}

/// (1 − 1/p)^{−r}(1 − r/p).
long double generic_factor(std::size_t r, std::uint64_t p)
{
    const auto x = static_cast<long double>(p);
    return std::pow(x / (x - 1.0L), static_cast<long double>(r)) * (1.0L - static_cast<long double>(r) / x);
}

void check_p_cut(std::uint64_t p_cut, std::uint64_t minimum)
{
    if (p_cut < minimum)
        throw std::invalid_argument("p_cut must be at least " + std::to_string(minimum));
    if (p_cut >= (std::uint64_t{1} << 32))
        throw capacity_error("p_cut must stay below 2^32");
}

EulerTail generic_product(std::size_t r, std::uint64_t p_cut)
{
    static std::mutex lock;
    static std::map<std::pair<std::size_t, std::uint64_t>, EulerTail> memo;
    {
        std::lock_guard guard(lock);
        if (auto it = memo.find({r, p_cut}); it != memo.end())
            return it->second;
    }
    const auto out = euler_with_tail([r](std::uint64_t p) { return generic_factor(r, p); }, p_cut, r + 1,
                                     static_cast<double>(r * (r + 1)));
    std::lock_guard guard(lock);
    memo.emplace(std::pair{r, p_cut}, out);
    return out;
}

Rational ratio_q(std::int64_t num, std::int64_t den)
{
    Rational q(static_cast<long>(num), static_cast<long>(den));
    q.canonicalize();
    return q;
}

/// p(n): the least prime ≥ n, for the supported n.
std::int64_t least_prime_at_least(int n) { return n <= 2 ? 2 : 3; }

void check_n(int n)
{
    if (n != 2 && n != 3)
        throw std::domain_error("singular series: n must be 2 or 3");
}

void check_distinct(std::span<const std::int64_t> shifts)
{
    if (shifts.empty())
        throw std::invalid_argument("singular_vector: at least one shift is required");
    std::vector<std::int64_t> sorted(shifts.begin(), shifts.end());
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw std::domain_error("singular_vector: shifts must be distinct");
}

} // namespace

unsigned ShiftPattern::k() const noexcept { return std::accumulate(multiplicities.begin(), multiplicities.end(), 0u); }

std::int64_t ShiftPattern::max_abs_shift() const noexcept
{
    std::int64_t m = 0;
    for (auto s : shifts)
        m = std::max(m, s < 0 ? -s : s);
    return m;
}

void ShiftPattern::validate() const
{
    if (shifts.empty())
        throw std::invalid_argument("shift pattern is empty");
    if (shifts.size() != multiplicities.size())
        throw std::invalid_argument("shift pattern: shifts and multiplicities differ in length");
    for (auto a : multiplicities)
        if (a == 0)
            throw std::invalid_argument("shift pattern: multiplicities must be positive");
    check_distinct(shifts);
}

ShiftPattern ShiftPattern::parse(const std::string &text)
{
    ShiftPattern out;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        if (item.empty())
            throw std::invalid_argument("shift pattern: empty entry in '" + text + "'");
        const auto colon = item.find(':');
        std::size_t used = 0;
        const std::string shift_text = item.substr(0, colon);
        const long long shift = std::stoll(shift_text, &used);
        if (used != shift_text.size())
            throw std::invalid_argument("shift pattern: bad shift '" + shift_text + "'");
        unsigned mult = 1;
        if (colon != std::string::npos) {
            const std::string mult_text = item.substr(colon + 1);
            const long long m = std::stoll(mult_text, &used);
            if (used != mult_text.size() || m <= 0 || m > 64)
                throw std::invalid_argument("shift pattern: bad multiplicity '" + mult_text + "'");
            mult = static_cast<unsigned>(m);
        }
        out.shifts.push_back(shift);
        out.multiplicities.push_back(mult);
    }
    out.validate();
    return out;
}

std::string ShiftPattern::to_string() const
{
    std::string s;
    for (std::size_t i = 0; i < shifts.size(); ++i) {
        if (i)
            s += ',';
        s += std::to_string(shifts[i]) + ':' + std::to_string(multiplicities[i]);
    }
    return s;
}

SingularValue constant_C(int n, std::uint64_t p_cut)
{
    check_n(n);
    check_p_cut(p_cut, 5);
    static std::mutex lock;
    static std::map<std::pair<int, std::uint64_t>, SingularValue> memo;
    {
        std::lock_guard guard(lock);
        if (auto it = memo.find({n, p_cut}); it != memo.end())
            return it->second;
    }
    // (n−1)/((p−1)(p−n+1)) ≤ 2.1(n−1)/p² for p > 5; −log(1−x) ≤ 1.2x there.
    const auto t = euler_with_tail([n](std::uint64_t p) { return c_factor(n, p); }, p_cut,
                                   static_cast<std::uint64_t>(n + 1), 2.5 * (n - 1));
    SingularValue out;
    out.value = static_cast<double>(t.product);
    out.p_cut = p_cut;
    out.tail_bound = t.tail_bound;
    std::lock_guard guard(lock);
    memo.emplace(std::pair{n, p_cut}, out);
    return out;
}

SingularValue singular_Sn(int n, std::int64_t j, std::uint64_t p_cut)
{
    check_n(n);
    if (j == 0)
        throw std::domain_error("singular_Sn: j must be nonzero");
    SingularValue out;
    out.p_cut = p_cut;
    if (j % least_prime_at_least(n) != 0) {
        check_p_cut(p_cut, 5);
        out.finite_part = 0;
        out.vanishes = true;
        return out;
    }
    const auto c = constant_C(n, p_cut);
    Rational part = 1;
    for (auto p64 : prime_divisors(j)) {
        const auto p = static_cast<std::int64_t>(p64);
        if (p == n - 1 || p == n)
            part *= ratio_q(p, p - 1);
        else
            part *= ratio_q(p - n + 1, p - n);
    }
    out.finite_part = part;
    out.value = to_double(part) * c.value;
    out.tail_bound = c.tail_bound;
    return out;
}

SingularValue singular_vector(std::span<const std::int64_t> shifts, std::uint64_t p_cut)
{
    check_distinct(shifts);
    const std::size_t r = shifts.size();
    check_p_cut(p_cut, std::max<std::uint64_t>(kMinPCut, 4 * r));
    SingularValue out;
    out.p_cut = p_cut;
    if (r == 1) {
        out.value = 1.0;
        return out;
    }

    std::set<std::uint64_t> special;
    for (std::uint64_t p = 2; p <= r; ++p)
        if (is_prime(static_cast<std::int64_t>(p)))
            special.insert(p);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t k = i + 1; k < r; ++k)
            for (auto p : prime_divisors(shifts[i] - shifts[k]))
                special.insert(p);

    Rational part = 1;
    long double correction = 1.0L;
    for (auto p : special) {
        std::set<std::int64_t> classes;
        const auto pi = static_cast<std::int64_t>(p);
        for (auto s : shifts)
            classes.insert(((s % pi) + pi) % pi);
        const auto nu = static_cast<std::int64_t>(classes.size());
        if (nu == pi) {
            SingularValue zero;
            zero.p_cut = p_cut;
            zero.finite_part = 0;
            zero.vanishes = true;
            return zero;
        }
        BigInt num = 1, den = 1;
        mpz_pow_ui(num.get_mpz_t(), BigInt(static_cast<long>(pi)).get_mpz_t(), r - 1);
        mpz_pow_ui(den.get_mpz_t(), BigInt(static_cast<long>(pi - 1)).get_mpz_t(), r);
        num *= pi - nu;
        Rational f(num, den);
        f.canonicalize();
        part *= f;
        if (p > r && p <= p_cut)
            correction /= generic_factor(r, p);
    }
    const auto g = generic_product(r, p_cut);
    out.finite_part = part;
    out.value = static_cast<double>(static_cast<long double>(to_double(part)) * g.product * correction);
    out.tail_bound = g.tail_bound;
    return out;
}

ProductIdentityResidual product_identity_check(std::int64_t j1, std::int64_t j2, std::uint64_t p_cut)
{
    if (j1 == 0 || j2 == 0 || j1 == j2)
        throw std::invalid_argument("product_identity_check: need nonzero distinct j1, j2");
    const std::int64_t shifts[3] = {0, j1, j2};
    const auto lhs = singular_vector(shifts, p_cut);
    const auto g = static_cast<std::int64_t>(gcd_u(j1, j2));
    const auto s2 = singular_Sn(2, g, p_cut);
    const __int128 prod = static_cast<__int128>(j1) * j2 * (j1 - j2);
    // 𝔖_3 only looks at the prime divisors of the product, so factor the pieces.
    SingularValue s3;
    if (prod % 3 != 0) {
        s3.vanishes = true;
        s3.finite_part = 0;
    } else {
        std::set<std::uint64_t> primes;
        for (auto v : {j1, j2, j1 - j2})
            for (auto p : prime_divisors(v))
                primes.insert(p);
        const auto c3 = constant_C(3, p_cut);
        Rational part = 1;
        for (auto p64 : primes) {
            const auto p = static_cast<std::int64_t>(p64);
            part *= (p == 2 || p == 3) ? ratio_q(p, p - 1) : ratio_q(p - 2, p - 3);
        }
        s3.finite_part = part;
        s3.value = to_double(part) * c3.value;
        s3.tail_bound = c3.tail_bound;
    }
    ProductIdentityResidual out;
    out.lhs = lhs.value;
    out.rhs = s2.value * s3.value;
    out.residual = std::abs(out.lhs - out.rhs);
    out.bound = std::abs(out.lhs) * lhs.tail_bound +
                std::abs(out.rhs) * ((1.0 + s2.tail_bound) * (1.0 + s3.tail_bound) - 1.0);
    return out;
}

double u_transform(std::span<const std::int64_t> shifts, std::uint64_t p_cut)
{
    check_distinct(shifts);
    const std::size_t r = shifts.size();
    if (r > 20)
        throw capacity_error("u_transform: at most 20 shifts");
    CompensatedSum total;
    std::vector<std::int64_t> subset;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << r); ++mask) {
        subset.clear();
        for (std::size_t i = 0; i < r; ++i)
            if (mask >> i & 1)
                subset.push_back(shifts[i]);
        const double s = subset.size() <= 1 ? 1.0 : singular_vector(subset, p_cut).value;
        total += ((r - subset.size()) % 2 ? -s : s);
    }
    return total.value();
}

std::vector<double> singular_S2_range(std::int64_t h, std::uint64_t p_cut)
{
    if (h < 0)
        throw std::invalid_argument("singular_S2_range: h must be non-negative");
    if (h > 1'000'000'000)
        throw capacity_error("singular_S2_range: h above 1e9");
    const double two_c2 = 2.0 * constant_C(2, p_cut).value;
    std::vector<double> out(static_cast<std::size_t>(h) + 1, 0.0);
    for (std::int64_t j = 2; j <= h; j += 2)
        out[static_cast<std::size_t>(j)] = two_c2;
    const auto primes = primes_up_to(static_cast<std::uint64_t>(std::max<std::int64_t>(h, 2)));
    for (const auto p32 : *primes) {
        const auto p = static_cast<std::int64_t>(p32);
        if (p > h)
            break;
        if (p == 2)
            continue;
        const double f = static_cast<double>(p - 1) / static_cast<double>(p - 2);
        for (std::int64_t m = 2 * p; m <= h; m += 2 * p)
            out[static_cast<std::size_t>(m)] *= f;
    }
    return out;
}

namespace {

void check_tuple_args(int r, std::int64_t h)
{
    if (r < 1 || r > 3)
        throw std::invalid_argument("tuple sums support r = 1, 2, 3");
    if (h < 1)
        throw std::invalid_argument("tuple sums need h >= 1");
    if (r == 3 && h > kMaxTripleH)
        throw capacity_error("r = 3 tuple sums limited to h <= " + std::to_string(kMaxTripleH));
    if (r == 2 && h > 1'000'000'000)
        throw capacity_error("r = 2 tuple sums limited to h <= 1e9");
}

/// Σ_{d<h} (h−d)·g(𝔖_2(d)), doubled for ordered pairs.
double pair_sum(std::int64_t h, std::uint64_t p_cut, double shift)
{
    const auto s2 = singular_S2_range(h, p_cut);
    const double total = parallel::ordered_sum(1, h - 1, [&](std::int64_t d) {
        return static_cast<double>(h - d) * (s2[static_cast<std::size_t>(d)] - shift);
    });
    return 2.0 * total;
}

/// 6 Σ_{0<a<b<h} (h−b)·[𝔖((0,a,b)) − u·(𝔖_2(a)+𝔖_2(b)+𝔖_2(b−a)) + 2u],
/// 𝔖((0,a,b)) from 𝔖_2(gcd)·𝔖_3(ab(b−a)).
double triple_sum(std::int64_t h, std::uint64_t p_cut, bool u_form)
{
    const auto s2 = singular_S2_range(h, p_cut);
    const double c3 = constant_C(3, p_cut).value;
    std::vector<std::uint32_t> spf(static_cast<std::size_t>(h) + 1, 0);
    for (std::int64_t i = 2; i <= h; ++i)
        if (spf[static_cast<std::size_t>(i)] == 0)
            for (std::int64_t m = i; m <= h; m += i)
                if (spf[static_cast<std::size_t>(m)] == 0)
                    spf[static_cast<std::size_t>(m)] = static_cast<std::uint32_t>(i);
    std::vector<double> h3(static_cast<std::size_t>(h) + 1, 1.0);
    for (std::int64_t p = 2; p <= h; ++p)
        if (spf[static_cast<std::size_t>(p)] == p)
            h3[static_cast<std::size_t>(p)] = p <= 3 ? static_cast<double>(p) / static_cast<double>(p - 1)
                                                      : static_cast<double>(p - 2) / static_cast<double>(p - 3);

    const double total = parallel::ordered_sum(2, h - 1, [&](std::int64_t b) {
        CompensatedSum inner;
        std::uint32_t primes[48];
        for (std::int64_t a = 1; a < b; ++a) {
            const auto g = std::gcd(a, b);
            double s = 0.0;
            if (g % 2 == 0 && (a % 3 == 0 || b % 3 == 0 || (b - a) % 3 == 0)) {
                int count = 0;
                for (auto v : {a, b, b - a}) {
                    while (v > 1) {
                        const auto p = spf[static_cast<std::size_t>(v)];
                        primes[count++] = p;
                        while (v % p == 0)
                            v /= p;
                    }
                }
                std::sort(primes, primes + count);
                double f = c3;
                for (int i = 0; i < count; ++i)
                    if (i == 0 || primes[i] != primes[i - 1])
                        f *= h3[primes[i]];
                s = s2[static_cast<std::size_t>(g)] * f;
            }
            if (u_form)
                s -= s2[static_cast<std::size_t>(a)] + s2[static_cast<std::size_t>(b)] +
                     s2[static_cast<std::size_t>(b - a)] - 2.0;
            inner += s;
        }
        return static_cast<double>(h - b) * inner.value();
    });
    return 6.0 * total;
}

double falling(std::int64_t x, int k)
{
    double out = 1.0;
    for (int i = 0; i < k; ++i)
        out *= static_cast<double>(x - i);
    return out;
}

double binomial(int n, int k)
{
    double out = 1.0;
    for (int i = 1; i <= k; ++i)
        out = out * (n - k + i) / i;
    return out;
}

} // namespace

double big_R(int r, std::int64_t h, std::uint64_t p_cut)
{
    check_tuple_args(r, h);
    if (r == 1) {
        double total = 0.0;
        for (std::int64_t j = 1; j <= h; ++j) {
            const std::int64_t single[] = {j};
            total += singular_vector(single, p_cut).value - 1.0;
        }
        return total;
    }
    if (r == 2)
        return pair_sum(h, p_cut, 1.0);
    return triple_sum(h, p_cut, true);
}

WeightedS2Sum weighted_S2_sum(std::int64_t h, std::uint64_t p_cut)
{
    if (h < 2)
        throw std::invalid_argument("weighted_S2_sum: h must be at least 2");
    WeightedS2Sum out;
    out.sum = pair_sum(h, p_cut, 0.0) / 2.0;
    const double x = static_cast<double>(h);
    out.main = x * x / 2.0 - x * std::log(x) / 2.0 + (1.0 - kEulerGamma - kLog2Pi) / 2.0 * x;
    return out;
}

double gallagher_sum(int r, std::int64_t h, std::uint64_t p_cut)
{
    check_tuple_args(r, h);
    if (r == 1)
        return static_cast<double>(h);
    if (r == 2)
        return pair_sum(h, p_cut, 0.0);
    return triple_sum(h, p_cut, false);
}

double gallagher_from_R(int r, std::int64_t h, std::uint64_t p_cut)
{
    check_tuple_args(r, h);
    CompensatedSum total;
    for (int m = 0; m <= r; ++m) {
        const double Rm = m == 0 ? 1.0 : big_R(m, h, p_cut);
        total += binomial(r, m) * falling(h - m, r - m) * Rm;
    }
    return total.value();
}

} // namespace divcorr
