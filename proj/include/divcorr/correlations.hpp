#pragma once

#include "divcorr/approximants.hpp"
#include "divcorr/arith_tables.hpp"
#include "divcorr/singular.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace divcorr {

/// Leading constants 𝒞_k(𝒂) of the pure correlations, keyed by the
/// multiplicities sorted in decreasing order, and the level-of-distribution
/// knob ϑ used to document the admissible range of R for mixed correlations.
struct PredictionConstants {
    double theta = 0.5;

    /// 𝒞_k(𝒂) for partitions of k <= 3; nothing otherwise.
    static std::optional<double> lookup(std::span<const unsigned> multiplicities);
    /// Largest log R / log N covered by the mixed-correlation theorem at this ϑ.
    double max_r_exponent(unsigned k) const;
};

struct CorrelationResult {
    ShiftPattern pattern;
    std::int64_t N = 0;
    std::uint64_t R = 0;
    bool mixed = false;
    bool primed = false; // n runs over [N+1, 2N] instead of [1, N]
    double computed = 0.0;
    std::optional<Rational> computed_exact;
    bool has_prediction = false;
    double singular = 0.0; // 𝔖(𝒋)
    double predicted_main = 0.0;
    double residual = 0.0;            // computed − predicted_main
    double normalized_residual = 0.0; // computed/predicted_main − 1
};

/// First and last n of the summation range.
std::pair<std::int64_t, std::int64_t> correlation_range(std::int64_t N, bool primed);

/// 𝒮_k(N, 𝒋, 𝒂) = Σ_n Π λ_R(n + j_i)^{a_i}.
CorrelationResult s_k(std::int64_t N, const ShiftPattern &pattern, const LambdaSeries &lambda,
                      bool primed = false);
CorrelationResult s_k(std::int64_t N, const ShiftPattern &pattern, std::uint64_t R, bool primed = false);
/// The same sum in exact arithmetic.
Rational s_k_exact(std::int64_t N, const ShiftPattern &pattern, const ExactLambdaSeries &lambda,
                   bool primed = false);

/// N·Σ_{r≤R} μ(r) μ((j,r)) φ((j,r)) / φ²(r), exact.
Rational s2_reduced(std::int64_t N, std::int64_t j, std::uint64_t R);
/// The r-sum alone in floating point (it tends to 𝔖_2(j) for j ≠ 0).
double s2_reduced_sum(std::int64_t j, std::uint64_t R);

/// Σ_{d|r1, e|r2, (d,e)|j} μ(d)μ(e)(d,e).
std::int64_t pair_kernel_brute(std::uint64_t r1, std::uint64_t r2, std::int64_t j);
/// [r1 = r2]·μ(r1)·μ((j,r1))·φ((j,r1)).
std::int64_t pair_kernel_closed(std::uint64_t r1, std::uint64_t r2, std::int64_t j);

/// Σ over d, e, f | a with (d,e) | j1−j2, (d,f) | j1, (e,f) | j2 of μ(d)μ(e)μ(f)·def/[d,e,f].
std::int64_t triple_kernel_brute(std::uint64_t a, std::int64_t j1, std::int64_t j2);
/// μφ((a,j1,j2)) φ₂((a,j1)) φ₂((a,j2)/(a,j1,j2)) φ₂((a,j1−j2)/(a,j1−j2,j1j2)) Π_{p|a, p∤j1j2(j1−j2)} (−2).
std::int64_t triple_kernel_closed(std::uint64_t a, std::int64_t j1, std::int64_t j2);

/// 𝒮̃_k: Σ_n Π_{i<r} λ_R(n + j_i)^{a_i} · Λ(n + j_r). The last multiplicity must be 1.
CorrelationResult s_tilde_k(std::int64_t N, const ShiftPattern &pattern, const LambdaSeries &lambda,
                            const ArithTables &tables, bool primed = false);
CorrelationResult s_tilde_k(std::int64_t N, const ShiftPattern &pattern, std::uint64_t R,
                            const ArithTables &tables, bool primed = false);

/// ψ_𝒋(N) = Σ_{n≤N} Π Λ(n + j_i).
double psi_tuple(std::int64_t N, std::span<const std::int64_t> shifts, const ArithTables &tables);

} // namespace divcorr
