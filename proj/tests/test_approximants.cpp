#include <doctest.h>

#include "divcorr/approximants.hpp"

#include <cmath>

using namespace divcorr;

namespace {

// Σ_{r≤R, (r,k)=1} μ²(r)/φ(r) by trial division.
Rational script_L_oracle(std::uint64_t R, std::uint64_t k)
{
    Rational s = 0;
    for (std::uint64_t r = 1; r <= R; ++r)
        if (gcd_u(static_cast<std::int64_t>(r), static_cast<std::int64_t>(k)) == 1 &&
            is_squarefree(static_cast<std::int64_t>(r)))
            s += Rational(1, totient_naive(r));
    s.canonicalize();
    return s;
}

} // namespace

TEST_CASE("lambda_R hand values")
{
    for (std::int64_t n = 1; n <= 30; ++n)
        CHECK(lambda_R_direct(n, 1) == 1);
    CHECK(lambda_R_direct(3, 2) == 2);
    CHECK(lambda_R_direct(4, 2) == 0);
    for (std::uint64_t R : {1u, 5u, 17u, 100u})
        CHECK(lambda_R_direct(1, R) == script_L_oracle(R, 1));
}

TEST_CASE("script L")
{
    CHECK(script_L(10, 2) == Rational(23, 12));
    for (std::uint64_t R : {1u, 2u, 30u, 211u})
        for (std::uint64_t k : {1u, 2u, 6u, 35u})
            CHECK(script_L(R, k) == script_L_oracle(R, k));
    const auto t = build_tables(200000);
    CHECK(script_L_value(1000, 6, t) == doctest::Approx(to_double(script_L(1000, 6))).epsilon(1e-13));
}

TEST_CASE("script L approaches its Hildebrand main term")
{
    const auto t = build_tables(1000000);
    double previous = 1e9;
    for (std::uint64_t x : {10000u, 1000000u}) {
        const double err = std::abs(script_L_value(x, 1, t) - hildebrand_main(static_cast<double>(x)));
        CHECK(err * std::sqrt(static_cast<double>(x)) < 10.0);
        CHECK(err < previous);
        previous = err;
    }
}

TEST_CASE("series agree with the defining double sum")
{
    for (std::uint64_t R : {1u, 2u, 7u, 30u, 64u}) {
        const LambdaSeries f(R, 400);
        const ExactLambdaSeries e(R, 400);
        for (std::int64_t n = 1; n <= 400; ++n) {
            const Rational direct = lambda_R_direct(n, R);
            REQUIRE(e(n) == direct);
            REQUIRE(f(n) == doctest::Approx(to_double(direct)).epsilon(1e-12));
        }
        CHECK(f(0) == 0.0);
        CHECK(e(-3) == 0);
    }
}

TEST_CASE("exact series scaling")
{
    const ExactLambdaSeries e(12, 50);
    for (std::int64_t n = 1; n <= 50; ++n) {
        Rational q(e.scaled(n), e.denominator());
        q.canonicalize();
        CHECK(q == e(n));
    }
    const auto w = build_weights(12, true);
    Rational y1 = w.exact.front();
    CHECK(w.divisors.front() == 1);
    CHECK(y1 == script_L(12));
}

TEST_CASE("psi_R prefix and increments")
{
    const LambdaSeries f(20, 1000);
    double running = 0.0;
    for (std::int64_t n = 1; n <= 1000; ++n)
        running += f(n);
    CHECK(f.psi(1000) == doctest::Approx(running).epsilon(1e-12));
    CHECK(static_cast<double>(f.psi_increment(100, 110)) == doctest::Approx(f.psi(110) - f.psi(100)));
    CHECK(psi_R(1000, 20) == doctest::Approx(running).epsilon(1e-12));
}

TEST_CASE("Lambda_R")
{
    for (std::uint64_t R : {2u, 10u, 97u})
        CHECK(biglambda_R(1, R) == doctest::Approx(std::log(static_cast<double>(R))));
    for (std::int64_t p : {2, 3, 5, 7, 11})
        CHECK(biglambda_R(p, 11) == doctest::Approx(std::log(static_cast<double>(p))));
    CHECK(biglambda_R(2, 2) == doctest::Approx(std::log(2.0)));
    const auto range = biglambda_R_range(300, 25);
    for (std::int64_t n = 1; n <= 300; ++n) {
        REQUIRE(range[static_cast<std::size_t>(n - 1)] == doctest::Approx(biglambda_R(n, 25)).epsilon(1e-12));
        REQUIRE(biglambda_R_exact(n, 25).value() == doctest::Approx(biglambda_R(n, 25)).epsilon(1e-12));
    }
    // n with all prime factors at most R and every squarefree divisor <= R: Λ_R(n) = Λ(n).
    CHECK(biglambda_R_exact(8, 10) == LogCombination::log_of(2));
    CHECK(biglambda_R_exact(6, 10).is_zero());
}

TEST_CASE("self correlation bound")
{
    const std::int64_t N = 2000;
    for (std::uint64_t R : {5u, 20u}) {
        const auto vals = lambda_R_range_exact(N, R);
        Rational s = 0;
        for (const auto &v : vals)
            s += v * v;
        const Rational diff = s - Rational(N) * script_L(R);
        const Rational bound = sigma_over_phi_sum(R) * sigma_over_phi_sum(R);
        CHECK(abs(diff) <= bound);
    }
}
