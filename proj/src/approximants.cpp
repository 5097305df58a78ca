#include "divcorr/approximants.hpp"

#include "divcorr/constants.hpp"
#include "divcorr/parallel.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace divcorr {

namespace {

struct SquarefreeEntry {
    std::uint64_t r;
    std::uint64_t phi;
    std::vector<std::uint64_t> primes;
};

std::vector<SquarefreeEntry> squarefree_up_to(std::uint64_t R)
{
    std::vector<SquarefreeEntry> out;
    for (std::uint64_t r = 1; r <= R; ++r) {
        if (r == 1) {
            out.push_back({1, 1, {}});
            continue;
        }
        const auto f = factorize(static_cast<std::int64_t>(r));
        bool sqfree = true;
        std::uint64_t phi = 1;
        std::vector<std::uint64_t> primes;
        for (const auto &pp : f) {
            if (pp.exponent > 1) {
                sqfree = false;
                break;
            }
            phi *= pp.p - 1;
            primes.push_back(pp.p);
        }
        if (sqfree)
            out.push_back({r, phi, std::move(primes)});
    }
    return out;
}

void check_R(std::uint64_t R)
{
    if (R < 1)
        throw std::invalid_argument("truncation level R must be at least 1");
}

} // namespace

ApproximantWeights build_weights(std::uint64_t R, bool exact)
{
    check_R(R);
    if (exact && R > kMaxExactR)
        throw capacity_error("build_weights: exact weights limited to R <= " + std::to_string(kMaxExactR));
    const auto entries = squarefree_up_to(R);

    ApproximantWeights w;
    w.R = R;
    std::vector<std::int64_t> index(R + 1, -1);
    for (const auto &e : entries) {
        index[e.r] = static_cast<std::int64_t>(w.divisors.size());
        w.divisors.push_back(e.r);
    }
    std::vector<long double> acc(w.divisors.size(), 0.0L);
    for (const auto &e : entries) {
        const long double inv = 1.0L / static_cast<long double>(e.phi);
        for (auto d : squarefree_divisors(e.primes))
            acc[static_cast<std::size_t>(index[d])] += inv;
    }
    w.value.resize(w.divisors.size());
    for (std::size_t i = 0; i < w.divisors.size(); ++i) {
        const auto d = w.divisors[i];
        const int mu = mobius_naive(static_cast<std::int64_t>(d));
        w.value[i] = static_cast<double>(static_cast<long double>(d) * mu * acc[i]);
    }

    if (exact) {
        w.has_exact = true;
        BigInt D = 1;
        for (const auto &e : entries)
            D = lcm(D, BigInt(static_cast<unsigned long>(e.phi)));
        w.denominator = D;
        std::vector<BigInt> sums(w.divisors.size(), BigInt(0));
        for (const auto &e : entries) {
            const BigInt share = D / BigInt(static_cast<unsigned long>(e.phi));
            for (auto d : squarefree_divisors(e.primes))
                sums[static_cast<std::size_t>(index[d])] += share;
        }
        w.scaled.resize(w.divisors.size());
        w.exact.resize(w.divisors.size());
        for (std::size_t i = 0; i < w.divisors.size(); ++i) {
            const auto d = w.divisors[i];
            w.scaled[i] = sums[i] * static_cast<long>(d) * mobius_naive(static_cast<std::int64_t>(d));
            w.exact[i] = Rational(w.scaled[i], D);
            w.exact[i].canonicalize();
        }
    }
    return w;
}

Rational lambda_R_direct(std::int64_t n, std::uint64_t R)
{
    check_R(R);
    Rational total = 0;
    if (n <= 0)
        return total;
    for (std::uint64_t r = 1; r <= R; ++r) {
        const int mu_r = mobius_naive(static_cast<std::int64_t>(r));
        if (mu_r == 0)
            continue;
        const auto g = gcd_u(static_cast<std::int64_t>(r), n);
        std::int64_t inner = 0;
        for (std::uint64_t d = 1; d <= g; ++d)
            if (g % d == 0)
                inner += static_cast<std::int64_t>(d) * mobius_naive(static_cast<std::int64_t>(d));
        if (inner != 0)
            total += Rational(inner, static_cast<unsigned long>(totient_naive(r)));
    }
    total.canonicalize();
    return total;
}

LambdaSeries::LambdaSeries(std::uint64_t R, std::int64_t limit) : LambdaSeries(build_weights(R), limit) {}

LambdaSeries::LambdaSeries(const ApproximantWeights &weights, std::int64_t limit)
    : R_(weights.R), limit_(std::max<std::int64_t>(limit, 0))
{
    const auto size = static_cast<std::size_t>(limit_) + 1;
    values_.assign(size, 0.0);
    for (std::size_t i = 0; i < weights.divisors.size(); ++i) {
        const auto d = static_cast<std::size_t>(weights.divisors[i]);
        const double y = weights.value[i];
        for (std::size_t m = d; m < size; m += d)
            values_[m] += y;
    }
    prefix_.assign(size, 0.0L);
    long double sum = 0.0L, comp = 0.0L;
    for (std::size_t n = 1; n < size; ++n) {
        const long double y = static_cast<long double>(values_[n]) - comp;
        const long double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        prefix_[n] = sum;
    }
}

double LambdaSeries::operator()(std::int64_t n) const
{
    if (n <= 0)
        return 0.0;
    if (n > limit_)
        throw std::out_of_range("LambdaSeries: n beyond evaluated range");
    return values_[static_cast<std::size_t>(n)];
}

double LambdaSeries::psi(std::int64_t x) const
{
    if (x <= 0)
        return 0.0;
    if (x > limit_)
        throw std::out_of_range("LambdaSeries::psi: x beyond evaluated range");
    return static_cast<double>(prefix_[static_cast<std::size_t>(x)]);
}

long double LambdaSeries::psi_increment(std::int64_t a, std::int64_t b) const
{
    if (a > limit_ || b > limit_)
        throw std::out_of_range("LambdaSeries::psi_increment: beyond evaluated range");
    const long double pb = b <= 0 ? 0.0L : prefix_[static_cast<std::size_t>(b)];
    const long double pa = a <= 0 ? 0.0L : prefix_[static_cast<std::size_t>(a)];
    return pb - pa;
}

ExactLambdaSeries::ExactLambdaSeries(std::uint64_t R, std::int64_t limit)
    : R_(R), limit_(std::max<std::int64_t>(limit, 0))
{
    if (limit_ > 2'000'000)
        throw capacity_error("ExactLambdaSeries: limit above 2e6");
    const auto w = build_weights(R, true);
    denominator_ = w.denominator;
    const auto size = static_cast<std::size_t>(limit_) + 1;
    scaled_.assign(size, BigInt(0));
    for (std::size_t i = 0; i < w.divisors.size(); ++i) {
        const auto d = static_cast<std::size_t>(w.divisors[i]);
        for (std::size_t m = d; m < size; m += d)
            scaled_[m] += w.scaled[i];
    }
}

const BigInt &ExactLambdaSeries::scaled(std::int64_t n) const
{
    if (n <= 0)
        return zero_;
    if (n > limit_)
        throw std::out_of_range("ExactLambdaSeries: n beyond evaluated range");
    return scaled_[static_cast<std::size_t>(n)];
}

Rational ExactLambdaSeries::operator()(std::int64_t n) const
{
    Rational q(scaled(n), denominator_);
    q.canonicalize();
    return q;
}

std::vector<double> lambda_R_range(std::int64_t N, std::uint64_t R)
{
    LambdaSeries s(R, N);
    return {s.values().begin() + 1, s.values().end()};
}

std::vector<Rational> lambda_R_range_exact(std::int64_t N, std::uint64_t R)
{
    ExactLambdaSeries s(R, N);
    std::vector<Rational> out;
    out.reserve(static_cast<std::size_t>(std::max<std::int64_t>(N, 0)));
    for (std::int64_t n = 1; n <= N; ++n)
        out.push_back(s(n));
    return out;
}

double biglambda_R(std::int64_t n, std::uint64_t R)
{
    check_R(R);
    if (n <= 0)
        return 0.0;
    CompensatedSum s;
    const double logR = std::log(static_cast<double>(R));
    for (auto d : squarefree_divisors(prime_divisors(n))) {
        if (d > R)
            continue;
        const int mu = mobius_naive(static_cast<std::int64_t>(d));
        s += mu * (logR - std::log(static_cast<double>(d)));
    }
    return s.value();
}

LogCombination biglambda_R_exact(std::int64_t n, std::uint64_t R)
{
    check_R(R);
    LogCombination out;
    if (n <= 0)
        return out;
    for (auto d : squarefree_divisors(prime_divisors(n))) {
        if (d > R)
            continue;
        const int mu = mobius_naive(static_cast<std::int64_t>(d));
        out += LogCombination::log_of(R, mu);
        out -= LogCombination::log_of(d, mu);
    }
    return out;
}

std::vector<double> biglambda_R_range(std::int64_t N, std::uint64_t R)
{
    check_R(R);
    std::vector<double> out(static_cast<std::size_t>(std::max<std::int64_t>(N, 0)), 0.0);
    const double logR = std::log(static_cast<double>(R));
    for (const auto &e : squarefree_up_to(R)) {
        const double c = (e.primes.size() % 2 ? -1.0 : 1.0) * (logR - std::log(static_cast<double>(e.r)));
        for (std::int64_t m = static_cast<std::int64_t>(e.r); m <= N; m += static_cast<std::int64_t>(e.r))
            out[static_cast<std::size_t>(m - 1)] += c;
    }
    return out;
}

double psi_R(std::int64_t x, std::uint64_t R)
{
    if (x <= 0)
        return 0.0;
    return LambdaSeries(R, x).psi(x);
}

Rational script_L(std::uint64_t R, std::uint64_t k)
{
    if (k == 0)
        throw std::invalid_argument("script_L: k must be positive");
    if (R > 10 * kMaxExactR)
        throw capacity_error("script_L: exact evaluation limited to R <= " + std::to_string(10 * kMaxExactR));
    Rational total = 0;
    for (const auto &e : squarefree_up_to(R))
        if (std::gcd(e.r, k) == 1)
            total += Rational(1, static_cast<unsigned long>(e.phi));
    total.canonicalize();
    return total;
}

double script_L_value(std::uint64_t x, std::uint64_t k, const ArithTables &tables)
{
    if (k == 0)
        throw std::invalid_argument("script_L_value: k must be positive");
    if (x > tables.n_max())
        throw std::out_of_range("script_L_value: x beyond table range");
    const auto mu = tables.mu_values();
    const auto phi = tables.phi_values();
    return parallel::ordered_sum(1, static_cast<std::int64_t>(x), [&](std::int64_t r) {
        const auto i = static_cast<std::size_t>(r);
        if (mu[i] == 0 || std::gcd(static_cast<std::uint64_t>(r), k) != 1)
            return 0.0;
        return 1.0 / static_cast<double>(phi[i]);
    });
}

double hildebrand_main(double R, std::uint64_t k)
{
    // P1 = 1, P2 = X − 1 in the polynomial-pair main term.
    return poly_pair_main_term(Polynomial{{1}}, Polynomial{{-1, 1}}, k, R);
}

Rational sigma_over_phi_sum(std::uint64_t R)
{
    check_R(R);
    Rational total = 0;
    for (const auto &e : squarefree_up_to(R)) {
        std::uint64_t sigma = 1;
        for (auto p : e.primes)
            sigma *= p + 1;
        total += Rational(static_cast<unsigned long>(sigma), static_cast<unsigned long>(e.phi));
    }
    total.canonicalize();
    return total;
}

} // namespace divcorr
