#include <doctest.h>

#include "divcorr/correlations.hpp"

#include <cmath>

using namespace divcorr;

namespace {

// Σ_{n in range} Π λ_R(n + j_i)^{a_i} with λ_R from the defining double sum.
Rational s_k_oracle(std::int64_t N, const ShiftPattern &pat, std::uint64_t R, bool primed)
{
    const std::int64_t lo = primed ? N + 1 : 1, hi = primed ? 2 * N : N;
    Rational s = 0;
    for (std::int64_t n = lo; n <= hi; ++n) {
        Rational term = 1;
        for (std::size_t i = 0; i < pat.r(); ++i)
            for (unsigned e = 0; e < pat.multiplicities[i]; ++e)
                term *= lambda_R_direct(n + pat.shifts[i], R);
        s += term;
    }
    return s;
}

bool squarefree_pos(std::uint64_t n) { return is_squarefree(static_cast<std::int64_t>(n)); }

} // namespace

TEST_CASE("prediction constants")
{
    const unsigned three[] = {3};
    const unsigned two_one[] = {1, 2};
    const unsigned four[] = {4};
    CHECK(*PredictionConstants::lookup(three) == 0.75);
    CHECK(*PredictionConstants::lookup(two_one) == 1.0);
    CHECK(!PredictionConstants::lookup(four));
    CHECK(PredictionConstants{}.max_r_exponent(3) == doctest::Approx(0.25));
}

TEST_CASE("pure correlations match the direct oracle exactly")
{
    const std::uint64_t R = 12;
    const ExactLambdaSeries ex(R, 200);
    for (const char *text : {"0:1", "0:2", "0:1,2:1", "0:1,1:1,3:1", "0:3", "0:2,4:1", "-2:1,5:2"}) {
        const auto pat = ShiftPattern::parse(text);
        for (bool primed : {false, true}) {
            const Rational oracle = s_k_oracle(60, pat, R, primed);
            CHECK(s_k_exact(60, pat, ex, primed) == oracle);
            CHECK(s_k(60, pat, R, primed).computed == doctest::Approx(to_double(oracle)).epsilon(1e-11));
        }
    }
}

TEST_CASE("pattern order does not matter")
{
    const auto a = s_k(5000, ShiftPattern::parse("0:1,2:2"), 30).computed;
    const auto b = s_k(5000, ShiftPattern::parse("2:2,0:1"), 30).computed;
    CHECK(a == doctest::Approx(b).epsilon(1e-13));
}

TEST_CASE("reduced pair sum")
{
    for (std::uint64_t R : {1u, 10u, 77u})
        CHECK(s2_reduced(1000, 0, R) == Rational(1000) * script_L(R));
    const double target = singular_Sn(2, 2).value;
    double previous = 1e9;
    for (std::uint64_t R : {100u, 1000u, 10000u}) {
        const double err = std::abs(s2_reduced_sum(2, R) - target);
        // j* d(j*) / (R φ(j*)) = 4/R for j = 2.
        CHECK(err <= 20.0 * 4.0 / static_cast<double>(R));
        CHECK(err <= previous * 1.5);
        previous = err;
    }
}

TEST_CASE("pair kernel")
{
    CHECK(pair_kernel_closed(1, 1, 5) == 1);
    CHECK(pair_kernel_closed(2, 2, 3) == -1);
    CHECK(pair_kernel_closed(2, 2, 4) == 1);
    for (std::int64_t j = -4; j <= 4; ++j) {
        CHECK(pair_kernel_closed(2, 3, j) == 0);
        CHECK(pair_kernel_brute(2, 3, j) == 0);
    }
    for (std::uint64_t r1 = 1; r1 <= 60; ++r1)
        for (std::uint64_t r2 = 1; r2 <= 60; ++r2)
            if (squarefree_pos(r1) && squarefree_pos(r2))
                for (std::int64_t j = -12; j <= 12; ++j)
                    REQUIRE(pair_kernel_brute(r1, r2, j) == pair_kernel_closed(r1, r2, j));
    CHECK_THROWS_AS(pair_kernel_closed(4, 4, 1), std::domain_error);
}

TEST_CASE("triple kernel")
{
    CHECK(triple_kernel_brute(1, 3, 7) == 1);
    CHECK(triple_kernel_closed(1, 3, 7) == 1);
    CHECK(triple_kernel_brute(2, 1, 3) == triple_kernel_closed(2, 1, 3));
    for (std::uint64_t p : {2u, 3u, 5u})
        CHECK(triple_kernel_brute(p, static_cast<std::int64_t>(p), 2 * static_cast<std::int64_t>(p)) ==
              triple_kernel_closed(p, static_cast<std::int64_t>(p), 2 * static_cast<std::int64_t>(p)));
    for (std::uint64_t a = 1; a <= 42; ++a)
        if (squarefree_pos(a))
            for (std::int64_t j1 = -6; j1 <= 6; ++j1)
                for (std::int64_t j2 = -6; j2 <= 6; ++j2)
                    if (j1 != j2)
                        REQUIRE(triple_kernel_brute(a, j1, j2) == triple_kernel_closed(a, j1, j2));
    CHECK_THROWS_AS(triple_kernel_closed(12, 1, 2), std::domain_error);
}

TEST_CASE("mixed correlations against a direct loop")
{
    const auto t = build_tables(2000);
    const std::uint64_t R = 9;
    const LambdaSeries lam(R, 2000);
    for (const char *text : {"0:1", "2:1,0:1", "0:2,2:1", "0:1,4:1,6:1"}) {
        const auto pat = ShiftPattern::parse(text);
        for (bool primed : {false, true}) {
            const std::int64_t lo = primed ? 301 : 1, hi = primed ? 600 : 300;
            double oracle = 0.0;
            for (std::int64_t n = lo; n <= hi; ++n) {
                double term = t.lambda(static_cast<std::uint64_t>(n + pat.shifts.back()));
                for (std::size_t i = 0; i + 1 < pat.r(); ++i)
                    term *= std::pow(to_double(lambda_R_direct(n + pat.shifts[i], R)), pat.multiplicities[i]);
                oracle += term;
            }
            CHECK(s_tilde_k(300, pat, lam, t, primed).computed == doctest::Approx(oracle).epsilon(1e-11));
        }
    }
    CHECK_THROWS_AS(s_tilde_k(300, ShiftPattern::parse("0:1,2:2"), lam, t), std::invalid_argument);
}

TEST_CASE("psi tuples")
{
    const auto t = build_tables(10000);
    CHECK(psi_tuple(5000, std::vector<std::int64_t>{0}, t) == doctest::Approx(t.psi(5000)).epsilon(1e-13));
    double oracle = 0.0;
    for (std::uint64_t n = 1; n <= 5000; ++n)
        oracle += t.lambda(n) * t.lambda(n + 1);
    CHECK(psi_tuple(5000, std::vector<std::int64_t>{0, 1}, t) == doctest::Approx(oracle).epsilon(1e-13));
}

TEST_CASE("pair correlation tracks its prediction")
{
    const auto res = s_k(200000, ShiftPattern::parse("0:1,2:1"), 20);
    REQUIRE(res.has_prediction);
    CHECK(res.predicted_main == doctest::Approx(200000 * singular_Sn(2, 2).value).epsilon(1e-9));
    CHECK(std::abs(res.normalized_residual) < 0.05);
    const auto zero = s_k(200000, ShiftPattern::parse("0:1,1:1"), 20);
    CHECK(zero.predicted_main == 0.0);
}
