#include "divcorr/exact.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

namespace divcorr {

std::vector<PrimePower> factorize(std::int64_t n)
{
    if (n == 0)
        throw std::domain_error("factorize: n must be nonzero");
    std::uint64_t m = n < 0 ? static_cast<std::uint64_t>(-(n + 1)) + 1 : static_cast<std::uint64_t>(n);
    std::vector<PrimePower> out;
    auto strip = [&](std::uint64_t p) {
        if (m % p != 0)
            return;
        PrimePower pp{p, 0};
        while (m % p == 0) {
            m /= p;
            ++pp.exponent;
        }
        out.push_back(pp);
    };
    strip(2);
    strip(3);
    for (std::uint64_t p = 5; p * p <= m; p += 6) {
        strip(p);
        strip(p + 2);
    }
    if (m > 1)
        out.push_back({m, 1});
    return out;
}

std::vector<std::uint64_t> prime_divisors(std::int64_t n)
{
    std::vector<std::uint64_t> out;
    for (const auto &pp : factorize(n))
        out.push_back(pp.p);
    return out;
}

bool is_prime(std::uint64_t n)
{
    if (n < 2)
        return false;
    const auto f = factorize(static_cast<std::int64_t>(n));
    return f.size() == 1 && f.front().exponent == 1;
}

bool is_squarefree(std::int64_t n)
{
    for (const auto &pp : factorize(n))
        if (pp.exponent > 1)
            return false;
    return true;
}

int mobius_naive(std::int64_t n)
{
    int mu = 1;
    for (const auto &pp : factorize(n)) {
        if (pp.exponent > 1)
            return 0;
        mu = -mu;
    }
    return mu;
}

std::uint64_t totient_naive(std::uint64_t n)
{
    if (n == 0)
        throw std::domain_error("totient: n must be positive");
    std::uint64_t phi = n;
    for (const auto &pp : factorize(static_cast<std::int64_t>(n)))
        phi = phi / pp.p * (pp.p - 1);
    return phi;
}

std::uint64_t gcd_u(std::int64_t a, std::int64_t b) noexcept
{
    auto mag = [](std::int64_t v) {
        return v < 0 ? static_cast<std::uint64_t>(-(v + 1)) + 1 : static_cast<std::uint64_t>(v);
    };
    return std::gcd(mag(a), mag(b));
}

std::vector<std::uint64_t> squarefree_divisors(const std::vector<std::uint64_t> &primes)
{
    std::vector<std::uint64_t> divs{1};
    divs.reserve(std::size_t{1} << primes.size());
    for (auto p : primes) {
        const auto n = divs.size();
        for (std::size_t i = 0; i < n; ++i)
            divs.push_back(divs[i] * p);
    }
    return divs;
}

LogCombination LogCombination::log_of(std::uint64_t n, std::int64_t c)
{
    if (n == 0)
        throw std::domain_error("log_of: n must be positive");
    LogCombination out;
    if (n == 1 || c == 0)
        return out;
    for (const auto &pp : factorize(static_cast<std::int64_t>(n)))
        out.add_log_prime(pp.p, c * static_cast<std::int64_t>(pp.exponent));
    return out;
}

void LogCombination::normalize_entry(std::uint64_t p)
{
    auto it = coeffs_.find(p);
    if (it != coeffs_.end() && it->second == 0)
        coeffs_.erase(it);
}

void LogCombination::add_log_prime(std::uint64_t p, std::int64_t c)
{
    if (c == 0)
        return;
    coeffs_[p] += c;
    normalize_entry(p);
}

LogCombination &LogCombination::operator+=(const LogCombination &other)
{
    for (const auto &[p, c] : other.coeffs_)
        add_log_prime(p, c);
    return *this;
}

LogCombination &LogCombination::operator-=(const LogCombination &other)
{
    for (const auto &[p, c] : other.coeffs_)
        add_log_prime(p, -c);
    return *this;
}

LogCombination LogCombination::operator*(std::int64_t c) const
{
    LogCombination out;
    if (c == 0)
        return out;
    for (const auto &[p, v] : coeffs_)
        out.coeffs_[p] = v * c;
    return out;
}

double LogCombination::value() const
{
    CompensatedSum s;
    for (const auto &[p, c] : coeffs_)
        s += static_cast<double>(c) * std::log(static_cast<double>(p));
    return s.value();
}

std::string LogCombination::to_string() const
{
    if (coeffs_.empty())
        return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto &[p, c] : coeffs_) {
        if (!first)
            os << (c < 0 ? " - " : " + ");
        else if (c < 0)
            os << "-";
        first = false;
        const auto mag = c < 0 ? -c : c;
        if (mag != 1)
            os << mag << "*";
        os << "log(" << p << ")";
    }
    return os.str();
}

double to_double(const Rational &q)
{
    // mpq_get_d truncates; go through mpf for a correctly scaled quotient.
    if (q == 0)
        return 0.0;
    mpf_class num(q.get_num(), 128), den(q.get_den(), 128);
    mpf_class r(0, 128);
    r = num / den;
    return r.get_d();
}

} // namespace divcorr
