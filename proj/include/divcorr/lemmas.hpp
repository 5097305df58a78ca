#pragma once

#include "divcorr/arith_tables.hpp"
#include "divcorr/constants.hpp"
#include "divcorr/exact.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace divcorr {

/// m(k) = Π_{p|k} (1 + 1/√p).
double m_of(std::int64_t k);

/// Monic integer polynomials with deg P2 = 1 + deg P1.
struct MonicPolyPair {
    Polynomial P1{{1}};
    Polynomial P2{{-1, 1}};

    void validate() const;
    /// Throws domain_error if P2(p) = 0 for some prime p <= limit.
    void check_nonvanishing(std::uint64_t limit) const;
    /// "c0,c1,..;d0,d1,.." with coefficients from the constant term up.
    static MonicPolyPair parse(const std::string &text);
    std::string to_string() const;
};

struct LemmaReport {
    std::string name;
    std::string normalization; // how scaled_error is formed
    std::vector<std::int64_t> x_ladder;
    std::vector<double> lhs;
    std::vector<double> main;
    std::vector<double> scaled_error;
    std::map<std::string, double> extras;
};

enum class LemmaSum { one, two, three, four, four_log, five };

struct LemmaParams {
    MonicPolyPair pair;
    std::int64_t k = 1;
    std::int64_t j = 2;
    std::int64_t J = 6;
};

/// The n-th summand from the sieve tables, or from trial division alone.
/// Both paths form each summand with the same arithmetic, so they agree bitwise.
double lemma_term_sieved(LemmaSum which, const LemmaParams &params, std::int64_t n, const ArithTables &tables);
double lemma_term_naive(LemmaSum which, const LemmaParams &params, std::int64_t n);

/// Partial sums of a summand at each ladder rung (ladder strictly increasing).
std::vector<double> ladder_sums(const std::vector<std::int64_t> &ladder,
                                const std::function<double(std::int64_t)> &term);

LemmaReport lemma1(const MonicPolyPair &pair, std::int64_t k, const std::vector<std::int64_t> &ladder,
                   const ArithTables &tables);
LemmaReport lemma2(const std::vector<std::int64_t> &ladder, const ArithTables &tables);
/// Π_p (1 + a_p/p)(1 − 1/p)³ with a_p = (3p−4)√p/((p−1)(√p−1)).
TruncatedConstant euler_P1(std::uint64_t p_cut = kEulerProductCut);
LemmaReport lemma3(const std::vector<std::int64_t> &ladder, const ArithTables &tables);
LemmaReport lemma4(std::int64_t j, std::int64_t k, const std::vector<std::int64_t> &ladder,
                   const ArithTables &tables);
/// The log-weighted sum −Σ μ(n) μφ((n,j)) log n / φ²(n) against its two-case main term.
LemmaReport lemma4_log(std::int64_t j, const std::vector<std::int64_t> &ladder, const ArithTables &tables);
LemmaReport lemma5(std::int64_t J, std::int64_t k, const std::vector<std::int64_t> &ladder,
                   const ArithTables &tables);

double lemma4_main(std::int64_t j, std::int64_t k);
double lemma4_log_main(std::int64_t j);
double lemma5_main(std::int64_t J, std::int64_t k);

struct MultIdentityResult {
    bool exact_equal = false;
    std::map<std::uint64_t, Rational> lhs; // coefficient of log p
    std::map<std::uint64_t, Rational> rhs;
    double lhs_value = 0.0;
    double rhs_value = 0.0;
};
/// Σ_{d|n} μ²(d) f(d) log d against (Σ_{p|n} f(p) log p/(1+f(p)))·Π_{p|n}(1+f(p)),
/// f multiplicative and given on primes.
MultIdentityResult mult_identity_check(std::int64_t n, const std::function<Rational(std::uint64_t)> &f);

} // namespace divcorr
