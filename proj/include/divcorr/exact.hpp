#pragma once

// Exact and compensated arithmetic shared by every module: GMP rationals,
// exact integer combinations of prime logarithms, Neumaier summation and a
// small trial-division factorizer that stays independent of the sieve tables.

#include <gmpxx.h>

#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace divcorr {

using Rational = mpq_class;
using BigInt = mpz_class;

/// Raised when a request would exceed the configured memory or work budget.
class capacity_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised when a hard-asserted identity does not hold.
class identity_failure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Neumaier (improved Kahan) running sum.
class CompensatedSum {
public:
    void add(double x) noexcept
    {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    CompensatedSum &operator+=(double x) noexcept
    {
        add(x);
        return *this;
    }
    void merge(const CompensatedSum &other) noexcept
    {
        add(other.sum_);
        add(other.comp_);
    }
    double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

struct PrimePower {
    std::uint64_t p = 0;
    unsigned exponent = 0;
};

/// Trial-division factorization of |n| (n != 0), primes ascending.
std::vector<PrimePower> factorize(std::int64_t n);

/// Distinct primes of |n| (n != 0), ascending.
std::vector<std::uint64_t> prime_divisors(std::int64_t n);

bool is_prime(std::uint64_t n);
bool is_squarefree(std::int64_t n);

/// Möbius function by trial division; independent of the sieve tables.
int mobius_naive(std::int64_t n);
/// Euler totient by trial division; independent of the sieve tables.
std::uint64_t totient_naive(std::uint64_t n);

/// Standard gcd with gcd(0, a) = |a|.
std::uint64_t gcd_u(std::int64_t a, std::int64_t b) noexcept;

/// All positive divisors of a squarefree number given by its primes.
std::vector<std::uint64_t> squarefree_divisors(const std::vector<std::uint64_t> &primes);

/// Exact integer combination Σ c_p·log p.
class LogCombination {
public:
    LogCombination() = default;

    /// c·log n, with log n expanded over the factorization of n >= 1.
    static LogCombination log_of(std::uint64_t n, std::int64_t c = 1);

    void add_log_prime(std::uint64_t p, std::int64_t c);
    LogCombination &operator+=(const LogCombination &other);
    LogCombination &operator-=(const LogCombination &other);
    LogCombination operator*(std::int64_t c) const;

    friend bool operator==(const LogCombination &a, const LogCombination &b)
    {
        return a.coeffs_ == b.coeffs_;
    }

    double value() const;
    bool is_zero() const noexcept { return coeffs_.empty(); }
    const std::map<std::uint64_t, std::int64_t> &coefficients() const noexcept { return coeffs_; }
    std::string to_string() const;

private:
    void normalize_entry(std::uint64_t p);
    std::map<std::uint64_t, std::int64_t> coeffs_;
};

/// Rational to double without overflow for large numerators/denominators.
double to_double(const Rational &q);

} // namespace divcorr
