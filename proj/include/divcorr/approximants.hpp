#pragma once

#include "divcorr/arith_tables.hpp"
#include "divcorr/exact.hpp"

#include <cstdint>
#include <vector>

namespace divcorr {

/// Divisor weights y_d = d·μ(d)·Σ_{r≤R, d|r} μ²(r)/φ(r) for squarefree d ≤ R,
/// so that λ_R(n) = Σ_{d|n, d≤R} y_d.
struct ApproximantWeights {
    std::uint64_t R = 1;
    std::vector<std::uint64_t> divisors; // squarefree d ≤ R, ascending
    std::vector<double> value;           // y_d
    bool has_exact = false;
    std::vector<Rational> exact;         // y_d, filled when has_exact
    BigInt denominator = 1;              // D = lcm{φ(r): r ≤ R squarefree}
    std::vector<BigInt> scaled;          // D·y_d, filled when has_exact
};

/// Largest R for which exact weights are produced.
inline constexpr std::uint64_t kMaxExactR = 5000;

ApproximantWeights build_weights(std::uint64_t R, bool exact = false);

/// λ_R(n) from its defining double sum Σ_{r≤R} μ²(r)/φ(r) Σ_{d|(r,n)} d μ(d),
/// by trial division only. Zero for n <= 0.
Rational lambda_R_direct(std::int64_t n, std::uint64_t R);

/// λ_R(n) for 0 <= n <= limit (λ_R(0) = 0), evaluated by spreading each
/// weight over the multiples of its divisor.
class LambdaSeries {
public:
    LambdaSeries(std::uint64_t R, std::int64_t limit);
    explicit LambdaSeries(const ApproximantWeights &weights, std::int64_t limit);

    std::uint64_t R() const noexcept { return R_; }
    std::int64_t limit() const noexcept { return limit_; }
    /// λ_R(n); zero for n <= 0.
    double operator()(std::int64_t n) const;
    /// ψ_R(x) = Σ_{1≤n≤x} λ_R(n); zero for x <= 0.
    double psi(std::int64_t x) const;
    /// ψ_R(b) − ψ_R(a) without cancellation loss in the prefix.
    long double psi_increment(std::int64_t a, std::int64_t b) const;
    const std::vector<double> &values() const noexcept { return values_; }

private:
    std::uint64_t R_;
    std::int64_t limit_;
    std::vector<double> values_;
    std::vector<long double> prefix_;
};

/// Exact λ_R(n) for 0 <= n <= limit stored as integers D·λ_R(n).
class ExactLambdaSeries {
public:
    ExactLambdaSeries(std::uint64_t R, std::int64_t limit);

    std::uint64_t R() const noexcept { return R_; }
    std::int64_t limit() const noexcept { return limit_; }
    const BigInt &denominator() const noexcept { return denominator_; }
    /// D·λ_R(n); zero for n <= 0.
    const BigInt &scaled(std::int64_t n) const;
    Rational operator()(std::int64_t n) const;

private:
    std::uint64_t R_;
    std::int64_t limit_;
    BigInt denominator_;
    BigInt zero_ = 0;
    std::vector<BigInt> scaled_;
};

/// Float λ_R(n) for n = 1..N.
std::vector<double> lambda_R_range(std::int64_t N, std::uint64_t R);
/// Exact λ_R(n) for n = 1..N.
std::vector<Rational> lambda_R_range_exact(std::int64_t N, std::uint64_t R);

/// Λ_R(n) = Σ_{d|n, d≤R} μ(d) log(R/d); zero for n <= 0.
double biglambda_R(std::int64_t n, std::uint64_t R);
/// The same sum as an exact combination of prime logarithms.
LogCombination biglambda_R_exact(std::int64_t n, std::uint64_t R);
/// Λ_R(n) for n = 1..N by spreading μ(d) log(R/d) over multiples of d.
std::vector<double> biglambda_R_range(std::int64_t N, std::uint64_t R);

/// ψ_R(x) = Σ_{n≤x} λ_R(n).
double psi_R(std::int64_t x, std::uint64_t R);

/// 𝓛_k(R) = Σ_{r≤R, (r,k)=1} μ²(r)/φ(r), exact (R <= kMaxExactR·10).
Rational script_L(std::uint64_t R, std::uint64_t k = 1);
/// Floating 𝓛_k(x) from the sieve tables (x <= n_max).
double script_L_value(std::uint64_t x, std::uint64_t k, const ArithTables &tables);
/// (φ(k)/k)(log R + γ + Σ_p log p/(p(p−1)) + Σ_{p|k} log p/p).
double hildebrand_main(double R, std::uint64_t k = 1);

/// Σ_{r≤R} μ²(r)σ(r)/φ(r), the rounding-error scale of divisor-sum counts.
Rational sigma_over_phi_sum(std::uint64_t R);

} // namespace divcorr
