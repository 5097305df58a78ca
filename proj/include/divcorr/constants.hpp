#pragma once

// Single source of truth for analytic constants: Euler's γ, log 2π, prime
// lists for Euler products, and truncated prime sums / products together with
// their truncation bounds.

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

namespace divcorr {

inline constexpr double kEulerGamma = 0.57721566490153286060651209008240243;
inline constexpr double kLog2Pi = 1.83787706640934548356065947281123527;
/// 2 − γ − log 2π, the linear coefficient in the pair average of 𝔘.
inline constexpr double kPairAverageA = 2.0 - kEulerGamma - kLog2Pi;

/// Default truncation for prime-indexed constant sums.
inline constexpr std::uint64_t kPrimeSumCut = 10'000'000;
/// Default truncation for singular-series Euler products.
inline constexpr std::uint64_t kEulerProductCut = 1'000'000;

/// Ascending primes covering at least [2, limit]; the list may run past limit.
/// The sieve is cached and extended on demand.
std::shared_ptr<const std::vector<std::uint32_t>> primes_up_to(std::uint64_t limit);

/// A constant evaluated from primes p <= p_cut. value includes an estimate of
/// the omitted tail; tail_bound majorizes |true value − truncated value|.
struct TruncatedConstant {
    double value = 0.0;
    std::uint64_t p_cut = 0;
    double tail_bound = 0.0;
};

/// Σ_{p ≤ p_cut} g(p) where g(p) ~ c·log p / p², plus the tail estimate
/// c/p_cut (prime number theorem density). tail_bound uses |g(p)| <= K log p/p²
/// with K calibrated on the top decade of primes.
TruncatedConstant prime_log_sum(const std::function<double(std::uint64_t)> &g, std::uint64_t p_cut);

/// Π_{p ≤ p_cut} f(p) where log f(p) ~ b/p², times the tail estimate exp(b·E₁(log p_cut)).
/// tail_bound is relative.
TruncatedConstant prime_euler_product(const std::function<double(std::uint64_t)> &f, std::uint64_t p_cut,
                                      std::uint64_t first_prime = 2);

/// Σ_p log p / (p(p−1)).
TruncatedConstant hildebrand_prime_sum(std::uint64_t p_cut = kPrimeSumCut);

/// Integer polynomial, coefficients from the constant term upward.
struct Polynomial {
    std::vector<std::int64_t> coeffs;

    int degree() const noexcept { return static_cast<int>(coeffs.size()) - 1; }
    bool monic() const noexcept { return !coeffs.empty() && coeffs.back() == 1; }
    __int128 eval(std::int64_t x) const;
    friend bool operator==(const Polynomial &, const Polynomial &) = default;
};

/// The two prime constants in the main term of
///   Σ_{n≤x,(n,k)=1} μ²(n) Π_{p|n} P1(p)/P2(p):
/// euler = Π_p (1 + ((p−1)P1(p) − P2(p)) / (p P2(p))),
/// log_sum = Σ_p (P2(p) − (p−2)P1(p)) / ((p−1)(P1(p)+P2(p))) · log p.
struct PolyPairConstants {
    TruncatedConstant euler;
    TruncatedConstant log_sum;
};
PolyPairConstants poly_pair_constants(const Polynomial &p1, const Polynomial &p2,
                                      std::uint64_t p_cut = kPrimeSumCut);

/// Main term of the polynomial-pair squarefree sum at x for modulus k:
/// euler · Π_{p|k} P2/(P1+P2) · [log x + γ + log_sum + Σ_{p|k} P1 log p/(P1+P2)].
double poly_pair_main_term(const Polynomial &p1, const Polynomial &p2, std::uint64_t k, double x,
                           std::uint64_t p_cut = kPrimeSumCut);

} // namespace divcorr
