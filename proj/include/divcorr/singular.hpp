#pragma once

#include "divcorr/constants.hpp"
#include "divcorr/exact.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace divcorr {

/// A singular-series evaluation: value = finite_part × (generic Euler product
/// over the remaining primes p <= p_cut, tail-corrected). tail_bound is a
/// relative bound on the effect of primes beyond p_cut. A vanishing series
/// is an exact zero with no tail.
struct SingularValue {
    double value = 0.0;
    Rational finite_part = 1;
    std::uint64_t p_cut = 0;
    double tail_bound = 0.0;
    bool vanishes = false;
};

/// Distinct shifts j_1..j_r with multiplicities a_1..a_r, k = Σ a_i.
struct ShiftPattern {
    std::vector<std::int64_t> shifts;
    std::vector<unsigned> multiplicities;

    std::size_t r() const noexcept { return shifts.size(); }
    unsigned k() const noexcept;
    std::int64_t max_abs_shift() const noexcept;
    void validate() const;

    /// Parses "0:1,2:1" (shift:multiplicity); a bare shift means multiplicity 1.
    static ShiftPattern parse(const std::string &text);
    std::string to_string() const;
};

/// Minimum truncation prime accepted by the Euler-product evaluators.
inline constexpr std::uint64_t kMinPCut = 100;

/// C_n = Π_{p ≠ n−1, n} (1 − (n−1)/((p−1)(p−n+1))), n ∈ {2, 3}.
SingularValue constant_C(int n, std::uint64_t p_cut = kEulerProductCut);

/// 𝔖_n(j) = C_n G_n(j) H_n(j) when p(n) | j, else 0; n ∈ {2, 3}, j ≠ 0.
SingularValue singular_Sn(int n, std::int64_t j, std::uint64_t p_cut = kEulerProductCut);

/// 𝔖(𝒋) = Π_p (1 − 1/p)^{−r}(1 − ν_p(𝒋)/p) for distinct shifts.
SingularValue singular_vector(std::span<const std::int64_t> shifts, std::uint64_t p_cut = kEulerProductCut);

struct ProductIdentityResidual {
    double lhs = 0.0; // 𝔖((0, j1, j2))
    double rhs = 0.0; // 𝔖_2((j1, j2)) 𝔖_3(j1 j2 (j1 − j2))
    double residual = 0.0;
    double bound = 0.0; // combined tail bounds, absolute
};
ProductIdentityResidual product_identity_check(std::int64_t j1, std::int64_t j2,
                                               std::uint64_t p_cut = kEulerProductCut);

/// 𝔘(𝒋) = Σ_{𝒥 ⊆ 𝒋} (−1)^{r−|𝒥|} 𝔖(𝒥), with 𝔖(∅) = 1.
double u_transform(std::span<const std::int64_t> shifts, std::uint64_t p_cut = kEulerProductCut);

/// 𝔖_2(j) for j = 0..h (entry 0 unused, zero), by sieving the H_2 factors.
std::vector<double> singular_S2_range(std::int64_t h, std::uint64_t p_cut = kEulerProductCut);

/// Largest h accepted for r = 3 tuple sums.
inline constexpr std::int64_t kMaxTripleH = 10'000;

/// R_r(h) = Σ over distinct r-tuples in [1, h] of 𝔘, r ∈ {1, 2, 3}.
double big_R(int r, std::int64_t h, std::uint64_t p_cut = kEulerProductCut);

struct WeightedS2Sum {
    double sum = 0.0;  // Σ_{1≤j≤h} (h − j) 𝔖_2(j)
    double main = 0.0; // h²/2 − (h log h)/2 + ((1 − γ − log 2π)/2) h
};
WeightedS2Sum weighted_S2_sum(std::int64_t h, std::uint64_t p_cut = kEulerProductCut);

/// Σ over distinct r-tuples in [1, h] of 𝔖(𝒋), r ∈ {1, 2, 3}.
double gallagher_sum(int r, std::int64_t h, std::uint64_t p_cut = kEulerProductCut);
/// The same sum rebuilt from R_0..R_r: Σ_m C(r,m) (h−m)(h−m−1)⋯(h−r+1) R_m(h).
double gallagher_from_R(int r, std::int64_t h, std::uint64_t p_cut = kEulerProductCut);

} // namespace divcorr
