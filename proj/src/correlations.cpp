#include "divcorr/correlations.hpp"

#include "divcorr/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace divcorr {

std::optional<double> PredictionConstants::lookup(std::span<const unsigned> multiplicities)
{
    std::vector<unsigned> a(multiplicities.begin(), multiplicities.end());
    std::sort(a.rbegin(), a.rend());
    const std::vector<std::pair<std::vector<unsigned>, double>> table = {
        {{1}, 1.0}, {{2}, 1.0}, {{1, 1}, 1.0}, {{3}, 0.75}, {{2, 1}, 1.0}, {{1, 1, 1}, 1.0},
    };
    for (const auto &[key, value] : table)
        if (key == a)
            return value;
    return std::nullopt;
}

double PredictionConstants::max_r_exponent(unsigned k) const
{
    if (k <= 1)
        return std::numeric_limits<double>::infinity();
    return theta / static_cast<double>(k - 1);
}

std::pair<std::int64_t, std::int64_t> correlation_range(std::int64_t N, bool primed)
{
    if (N < 1)
        throw std::invalid_argument("correlation range: N must be positive");
    return primed ? std::pair{N + 1, 2 * N} : std::pair{std::int64_t{1}, N};
}

namespace {

std::int64_t max_shift(const ShiftPattern &p)
{
    return *std::max_element(p.shifts.begin(), p.shifts.end());
}

void require_limit(std::int64_t need, std::int64_t have, const char *what)
{
    if (need > have)
        throw std::out_of_range(std::string(what) + ": range needs values up to " + std::to_string(need) +
                                ", have " + std::to_string(have));
}

void attach_prediction(CorrelationResult &out, std::optional<double> constant)
{
    const auto &pat = out.pattern;
    out.singular = singular_vector(pat.shifts).value;
    if (!constant)
        return;
    const int excess = static_cast<int>(pat.k()) - static_cast<int>(pat.r());
    out.has_prediction = true;
    out.predicted_main = *constant * out.singular * static_cast<double>(out.N) *
                         std::pow(std::log(static_cast<double>(out.R)), excess);
    out.residual = out.computed - out.predicted_main;
    out.normalized_residual =
        out.predicted_main != 0.0 ? out.computed / out.predicted_main - 1.0 : std::numeric_limits<double>::quiet_NaN();
}

double int_pow(double x, unsigned a)
{
    double out = 1.0;
    for (unsigned i = 0; i < a; ++i)
        out *= x;
    return out;
}

} // namespace

CorrelationResult s_k(std::int64_t N, const ShiftPattern &pattern, const LambdaSeries &lambda, bool primed)
{
    pattern.validate();
    const auto [lo, hi] = correlation_range(N, primed);
    require_limit(hi + max_shift(pattern), lambda.limit(), "s_k");
    CorrelationResult out;
    out.pattern = pattern;
    out.N = N;
    out.R = lambda.R();
    out.primed = primed;
    out.computed = parallel::ordered_sum(lo, hi, [&](std::int64_t n) {
        double t = 1.0;
        for (std::size_t i = 0; i < pattern.r(); ++i)
            t *= int_pow(lambda(n + pattern.shifts[i]), pattern.multiplicities[i]);
        return t;
    });
    attach_prediction(out, PredictionConstants::lookup(pattern.multiplicities));
    return out;
}

CorrelationResult s_k(std::int64_t N, const ShiftPattern &pattern, std::uint64_t R, bool primed)
{
    pattern.validate();
    const auto [lo, hi] = correlation_range(N, primed);
    (void)lo;
    const LambdaSeries lambda(R, hi + std::max<std::int64_t>(max_shift(pattern), 0));
    return s_k(N, pattern, lambda, primed);
}

Rational s_k_exact(std::int64_t N, const ShiftPattern &pattern, const ExactLambdaSeries &lambda, bool primed)
{
    pattern.validate();
    const auto [lo, hi] = correlation_range(N, primed);
    require_limit(hi + max_shift(pattern), lambda.limit(), "s_k_exact");
    BigInt total = 0, term;
    for (std::int64_t n = lo; n <= hi; ++n) {
        term = 1;
        for (std::size_t i = 0; i < pattern.r(); ++i) {
            const auto &v = lambda.scaled(n + pattern.shifts[i]);
            for (unsigned a = 0; a < pattern.multiplicities[i]; ++a)
                term *= v;
            if (term == 0)
                break;
        }
        total += term;
    }
    BigInt den;
    mpz_pow_ui(den.get_mpz_t(), lambda.denominator().get_mpz_t(), pattern.k());
    Rational q(total, den);
    q.canonicalize();
    return q;
}

Rational s2_reduced(std::int64_t N, std::int64_t j, std::uint64_t R)
{
    if (R < 1)
        throw std::invalid_argument("s2_reduced: R must be at least 1");
    Rational total = 0;
    for (std::uint64_t r = 1; r <= R; ++r) {
        const int mu_r = mobius_naive(static_cast<std::int64_t>(r));
        if (mu_r == 0)
            continue;
        const auto g = gcd_u(j, static_cast<std::int64_t>(r));
        const std::int64_t num = static_cast<std::int64_t>(mu_r) * mobius_naive(static_cast<std::int64_t>(g)) *
                                 static_cast<std::int64_t>(totient_naive(g));
        BigInt den = BigInt(static_cast<unsigned long>(totient_naive(r)));
        den *= den;
        total += Rational(BigInt(static_cast<long>(num)), den);
    }
    total *= BigInt(static_cast<long>(N));
    total.canonicalize();
    return total;
}

double s2_reduced_sum(std::int64_t j, std::uint64_t R)
{
    if (R < 1)
        throw std::invalid_argument("s2_reduced_sum: R must be at least 1");
    CompensatedSum total;
    for (std::uint64_t r = 1; r <= R; ++r) {
        const int mu_r = mobius_naive(static_cast<std::int64_t>(r));
        if (mu_r == 0)
            continue;
        const auto g = gcd_u(j, static_cast<std::int64_t>(r));
        const double phi_r = static_cast<double>(totient_naive(r));
        total += mu_r * mobius_naive(static_cast<std::int64_t>(g)) * static_cast<double>(totient_naive(g)) /
                 (phi_r * phi_r);
    }
    return total.value();
}

namespace {

void require_squarefree(std::uint64_t r, const char *what)
{
    if (r == 0 || !is_squarefree(static_cast<std::int64_t>(r)))
        throw std::domain_error(std::string(what) + ": argument must be a positive squarefree integer");
}

bool divides(std::uint64_t d, std::int64_t j) { return j % static_cast<std::int64_t>(d) == 0; }

} // namespace

std::int64_t pair_kernel_brute(std::uint64_t r1, std::uint64_t r2, std::int64_t j)
{
    require_squarefree(r1, "pair_kernel");
    require_squarefree(r2, "pair_kernel");
    const auto ds = squarefree_divisors(prime_divisors(static_cast<std::int64_t>(r1)));
    const auto es = squarefree_divisors(prime_divisors(static_cast<std::int64_t>(r2)));
    std::int64_t total = 0;
    for (auto d : ds)
        for (auto e : es) {
            const auto g = std::gcd(d, e);
            if (divides(g, j))
                total += mobius_naive(static_cast<std::int64_t>(d)) * mobius_naive(static_cast<std::int64_t>(e)) *
                         static_cast<std::int64_t>(g);
        }
    return total;
}

std::int64_t pair_kernel_closed(std::uint64_t r1, std::uint64_t r2, std::int64_t j)
{
    require_squarefree(r1, "pair_kernel");
    require_squarefree(r2, "pair_kernel");
    if (r1 != r2)
        return 0;
    const auto g = gcd_u(j, static_cast<std::int64_t>(r1));
    return static_cast<std::int64_t>(mobius_naive(static_cast<std::int64_t>(r1))) *
           mobius_naive(static_cast<std::int64_t>(g)) * static_cast<std::int64_t>(totient_naive(g));
}

std::int64_t triple_kernel_brute(std::uint64_t a, std::int64_t j1, std::int64_t j2)
{
    require_squarefree(a, "triple_kernel");
    const auto divs = squarefree_divisors(prime_divisors(static_cast<std::int64_t>(a)));
    std::int64_t total = 0;
    for (auto d : divs)
        for (auto e : divs) {
            if (!divides(std::gcd(d, e), j1 - j2))
                continue;
            for (auto f : divs) {
                if (!divides(std::gcd(d, f), j1) || !divides(std::gcd(e, f), j2))
                    continue;
                const auto l = std::lcm(std::lcm(d, e), f);
                const int sign = mobius_naive(static_cast<std::int64_t>(d)) *
                                 mobius_naive(static_cast<std::int64_t>(e)) *
                                 mobius_naive(static_cast<std::int64_t>(f));
                total += sign * static_cast<std::int64_t>(d * e * f / l);
            }
        }
    return total;
}

std::int64_t triple_kernel_closed(std::uint64_t a, std::int64_t j1, std::int64_t j2)
{
    require_squarefree(a, "triple_kernel");
    const auto ai = static_cast<std::int64_t>(a);
    const auto g12 = static_cast<std::int64_t>(gcd_u(ai, static_cast<std::int64_t>(gcd_u(j1, j2))));
    const auto g1 = static_cast<std::int64_t>(gcd_u(ai, j1));
    const auto g2 = static_cast<std::int64_t>(gcd_u(ai, j2));
    const auto gd = static_cast<std::int64_t>(gcd_u(ai, j1 - j2));
    // (a, j1−j2, j1 j2) without forming the product.
    std::int64_t gdp = 1;
    for (auto p : prime_divisors(gd))
        if (divides(p, j1) || divides(p, j2))
            gdp *= static_cast<std::int64_t>(p);

    std::int64_t out = mobius_naive(g12) * static_cast<std::int64_t>(totient_naive(static_cast<std::uint64_t>(g12)));
    out *= phi2(g1) * phi2(g2 / g12) * phi2(gd / gdp);
    for (auto p : prime_divisors(ai))
        if (!divides(p, j1) && !divides(p, j2) && !divides(p, j1 - j2))
            out *= -2;
    return out;
}

CorrelationResult s_tilde_k(std::int64_t N, const ShiftPattern &pattern, const LambdaSeries &lambda,
                            const ArithTables &tables, bool primed)
{
    pattern.validate();
    if (pattern.multiplicities.back() != 1)
        throw std::invalid_argument("s_tilde_k: the von Mangoldt slot (last shift) must have multiplicity 1");
    const auto [lo, hi] = correlation_range(N, primed);
    const std::int64_t top = hi + max_shift(pattern);
    require_limit(top, lambda.limit(), "s_tilde_k");
    require_limit(top, static_cast<std::int64_t>(tables.n_max()), "s_tilde_k");
    const auto big_lambda = tables.lambda_values();
    const std::size_t r = pattern.r();
    const std::int64_t jr = pattern.shifts[r - 1];

    CorrelationResult out;
    out.pattern = pattern;
    out.N = N;
    out.R = lambda.R();
    out.mixed = true;
    out.primed = primed;
    out.computed = parallel::ordered_sum(lo, hi, [&](std::int64_t n) {
        const std::int64_t m = n + jr;
        if (m <= 0)
            return 0.0;
        double t = big_lambda[static_cast<std::size_t>(m)];
        if (t == 0.0)
            return 0.0;
        for (std::size_t i = 0; i + 1 < r; ++i)
            t *= int_pow(lambda(n + pattern.shifts[i]), pattern.multiplicities[i]);
        return t;
    });
    // The mixed prediction carries 𝔖(𝒋) with unit leading constant.
    attach_prediction(out, pattern.k() <= 3 ? std::optional<double>(1.0) : std::nullopt);
    return out;
}

CorrelationResult s_tilde_k(std::int64_t N, const ShiftPattern &pattern, std::uint64_t R,
                            const ArithTables &tables, bool primed)
{
    pattern.validate();
    const auto [lo, hi] = correlation_range(N, primed);
    (void)lo;
    const LambdaSeries lambda(R, hi + std::max<std::int64_t>(max_shift(pattern), 0));
    return s_tilde_k(N, pattern, lambda, tables, primed);
}

double psi_tuple(std::int64_t N, std::span<const std::int64_t> shifts, const ArithTables &tables)
{
    if (N < 1)
        throw std::invalid_argument("psi_tuple: N must be positive");
    if (shifts.empty())
        throw std::invalid_argument("psi_tuple: at least one shift is required");
    std::vector<std::int64_t> sorted(shifts.begin(), shifts.end());
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw std::domain_error("psi_tuple: shifts must be distinct");
    require_limit(N + sorted.back(), static_cast<std::int64_t>(tables.n_max()), "psi_tuple");
    const auto lam = tables.lambda_values();
    return parallel::ordered_sum(1, N, [&](std::int64_t n) {
        double t = 1.0;
        for (auto j : shifts) {
            const std::int64_t m = n + j;
            if (m <= 0)
                return 0.0;
            t *= lam[static_cast<std::size_t>(m)];
            if (t == 0.0)
                return 0.0;
        }
        return t;
    });
}

} // namespace divcorr
