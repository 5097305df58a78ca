#pragma once

#include "divcorr/approximants.hpp"
#include "divcorr/arith_tables.hpp"
#include "divcorr/correlations.hpp"

#include <cstdint>
#include <optional>

namespace divcorr {

struct MomentReport {
    unsigned k = 0;
    std::int64_t N = 0, h = 0;
    std::uint64_t R = 0;
    bool mixed = false;
    bool centered = false;
    double computed = 0.0;
    std::optional<Rational> computed_exact;
    double via_correlations = 0.0;
    std::optional<Rational> via_exact;
    double predicted = 0.0;
    bool has_prediction = false;
    double lambda_param = 0.0; // h / log N
    double theta = 0.0;        // log R / log N
    double expansion_residual = 0.0;  // computed − via_correlations
    double normalized_residual = 0.0; // computed/predicted − 1
};

/// Σ_{n≤N} (ψ_R(n+h) − ψ_R(n))^k.
double moment_psiR_direct(const LambdaSeries &lambda, std::int64_t N, std::int64_t h, unsigned k);
Rational moment_psiR_direct(const ExactLambdaSeries &lambda, std::int64_t N, std::int64_t h, unsigned k);

/// Σ_r Σ_𝒂 multinomial(k; 𝒂) Σ_{1≤j_1<…<j_r≤h} 𝒮_k(N, 𝒋, 𝒂), the grouped form.
double expand_via_correlations(const LambdaSeries &lambda, std::int64_t N, std::int64_t h, unsigned k);
Rational expand_via_correlations(const ExactLambdaSeries &lambda, std::int64_t N, std::int64_t h, unsigned k);

/// N h^k-type prediction: Nh, Nh² + Nh log R, Nh³ + 3Nh² log R + (3/4)Nh log²R.
std::optional<double> moment_psiR_prediction(std::int64_t N, std::int64_t h, std::uint64_t R, unsigned k);

/// Direct and grouped moments with the prediction attached; exact mode
/// requires R <= kMaxExactR and N + h <= 2e6.
MomentReport moment_psiR(std::int64_t N, std::int64_t h, std::uint64_t R, unsigned k, bool exact = false);

/// {k r}, 1 <= r <= k <= 20.
std::uint64_t stirling2(unsigned k, unsigned r);

/// Σ_{n≤N} (ψ(n+h) − ψ(n))^k, or the centered Σ(ψ(n+h) − ψ(n) − h)^k.
/// The prediction is N(log N)^k Σ_r {k r} λ^r uncentered and
/// (k−1)!!·N(h log(N/h))^{k/2} centered (zero for odd k).
MomentReport moment_psi(std::int64_t N, std::int64_t h, unsigned k, const ArithTables &tables,
                        bool centered = false);

struct FirstMomentIdentity {
    LogCombination direct;    // Σ_n Σ_{n<m≤n+h} Λ(m)
    LogCombination split;     // three-piece rearrangement
    bool exact_equal = false;
    double direct_value = 0.0;
    double psi_form = 0.0;    // ψ(N+h) − ψ(N) − ψ(h) − ∫_2^h ψ + ∫_N^{N+h} ψ
    double psi_form_residual = 0.0;
};
FirstMomentIdentity first_moment_identity(std::int64_t N, std::int64_t h, const ArithTables &tables);

/// M̃_k = Σ_n (ψ_R(n+h) − ψ_R(n))^{k−1}(ψ(n+h) − ψ(n)) for k ∈ {1, 2, 3}; M̃_1 = M_1(ψ).
/// via_correlations holds the mixed-correlation expansion with 𝓛_1(R) standing in
/// for λ_R at the von Mangoldt point, which is approximate.
MomentReport mixed_moment(std::int64_t N, std::int64_t h, std::uint64_t R, unsigned k, const ArithTables &tables,
                          bool primed = false);
MomentReport mixed_moment(const LambdaSeries &lambda, std::int64_t N, std::int64_t h, unsigned k,
                          const ArithTables &tables, bool primed = false);

/// The mixed expansion assembled from literal sums of 𝒮̃ over distinct tuples
/// (small N and h only); agrees with the per-n power-sum form.
double mixed_expansion_literal(const LambdaSeries &lambda, std::int64_t N, std::int64_t h, unsigned k,
                               const ArithTables &tables, bool primed = false);

struct OmegaExperiment {
    std::int64_t N = 0, h = 0;
    std::uint64_t R = 0;
    double rho = 0.0, C = 0.0;
    double A = 0.0; // (h log N)^{1/2}
    double m1 = 0.0, m2 = 0.0, m3 = 0.0;                          // direct over n ∈ [N+1, 2N]
    double m1_expanded = 0.0, m2_expanded = 0.0, m3_expanded = 0.0; // from M′ and M̃′ pieces
    double predicted_m2 = 0.0; // Nh(ρC log N + log(R/h))
    double predicted_m3 = 0.0; // −N h^{3/2} log^{1/2}N (ρC² log N + (2C+ρ) log(R/h))
    double theta = 0.0, alpha = 0.0; // log R / log N, log h / log N
    bool in_proven_regime = false;   // log¹⁴N ≤ h
};

/// Coupled choice C = −(θ − α)/ρ for R = N^θ, h = N^α.
double omega_preset_C(std::int64_t N, std::int64_t h, std::uint64_t R, double rho);

OmegaExperiment omega_experiment(std::int64_t N, std::int64_t h, std::uint64_t R, double rho, double C,
                                 const ArithTables &tables);

} // namespace divcorr
