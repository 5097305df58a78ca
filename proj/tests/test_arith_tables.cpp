#include <doctest.h>

#include "divcorr/arith_tables.hpp"
#include "divcorr/parallel.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numeric>

using namespace divcorr;

TEST_CASE("small table values")
{
    const auto t = build_tables(10);
    const int mu[] = {1, -1, -1, 0, -1, 1, -1, 0, 0, 1};
    for (int n = 1; n <= 10; ++n)
        CHECK(t.mu(n) == mu[n - 1]);
    CHECK(t.phi(9) == 6);
    CHECK(t.num_div(9) == 3);
    const double psi10 = 3 * std::log(2.0) + 2 * std::log(3.0) + std::log(5.0) + std::log(7.0);
    CHECK(t.psi(10) == doctest::Approx(psi10).epsilon(1e-15));
    CHECK(t.psi(10) == doctest::Approx(7.8320).epsilon(1e-4));
}

TEST_CASE("sieve agrees with trial division")
{
    const auto t = build_tables(20000);
    for (std::uint64_t n = 1; n <= 20000; ++n) {
        REQUIRE(t.mu(n) == mobius_naive(static_cast<std::int64_t>(n)));
        REQUIRE(t.phi(n) == totient_naive(n));
        const auto pp = t.prime_power(n);
        const auto f = n > 1 ? factorize(static_cast<std::int64_t>(n)) : std::vector<PrimePower>{};
        if (f.size() == 1) {
            REQUIRE(pp);
            CHECK(t.lambda(n) == doctest::Approx(std::log(static_cast<double>(f[0].p))));
        } else {
            CHECK(!pp);
            CHECK(t.lambda(n) == 0.0);
        }
        unsigned d = 1;
        for (auto [p, e] : f)
            d *= e + 1;
        REQUIRE(t.num_div(n) == d);
    }
}

TEST_CASE("multiplicativity and divisor sums")
{
    const auto t = build_tables(3000);
    for (std::uint64_t m = 1; m <= 60; ++m)
        for (std::uint64_t n = 1; n <= 50; ++n)
            if (std::gcd(m, n) == 1) {
                REQUIRE(t.mu(m * n) == t.mu(m) * t.mu(n));
                REQUIRE(t.phi(m * n) == t.phi(m) * t.phi(n));
            }
    for (std::uint64_t n = 1; n <= 3000; ++n) {
        std::uint64_t phi_sum = 0;
        int mu_sum = 0;
        for (std::uint64_t d = 1; d <= n; ++d)
            if (n % d == 0) {
                phi_sum += t.phi(d);
                mu_sum += t.mu(d);
            }
        REQUIRE(phi_sum == n);
        REQUIRE(mu_sum == (n == 1 ? 1 : 0));
    }
}

TEST_CASE("phi2 and squarefree kernel")
{
    CHECK(phi2(1) == 1);
    CHECK(phi2(15) == 3);
    CHECK(phi2(2) == 0);
    CHECK(squarefree_kernel(12).value == 6);
    CHECK(squarefree_kernel(-7).value == 7);
    CHECK(squarefree_kernel(360).value == 30);
}

TEST_CASE("primes in progressions")
{
    const auto t = build_tables(1000);
    const double expect = 2 * std::log(3.0) + std::log(5.0) + std::log(7.0);
    CHECK(psi_ap(10, 2, 1, t) == doctest::Approx(expect));
    CHECK(expect == doctest::Approx(5.7520).epsilon(1e-4));
    CHECK(bv_sum(1000, 1, t) == doctest::Approx(std::abs(t.psi(1000) - 1000.0)));
}

TEST_CASE("bv_sum is reproducible across thread counts")
{
    const auto t = build_tables(100000);
    parallel::set_thread_count(1);
    const double a = bv_sum(100000, 10, t);
    parallel::set_thread_count(4);
    const double b = bv_sum(100000, 10, t);
    parallel::set_thread_count(1);
    CHECK(a == b);
}

TEST_CASE("ordered_sum does not depend on the thread count")
{
    auto term = [](std::int64_t n) { return 1.0 / static_cast<double>(n); };
    parallel::set_thread_count(1);
    const double a = parallel::ordered_sum(1, 300000, term);
    parallel::set_thread_count(3);
    const double b = parallel::ordered_sum(1, 300000, term);
    parallel::set_thread_count(1);
    CHECK(a == b);
}

TEST_CASE("cache round trip")
{
    const auto dir = std::filesystem::temp_directory_path() / "divcorr_table_test";
    std::filesystem::create_directories(dir);
    const auto path = dir / "t.bin";
    const auto t = build_tables(5000);
    save_tables(t, path);
    const auto u = load_tables(path);
    REQUIRE(u.n_max() == 5000);
    for (std::uint64_t n = 1; n <= 5000; ++n) {
        REQUIRE(u.mu(n) == t.mu(n));
        REQUIRE(u.phi(n) == t.phi(n));
        REQUIRE(u.lambda(n) == t.lambda(n));
    }
    CHECK(u.psi(5000) == t.psi(5000));
    std::filesystem::remove_all(dir);
}

TEST_CASE("memory budget is enforced")
{
    TableOptions opts;
    opts.memory_budget_bytes = 1000;
    CHECK_THROWS_AS(build_tables(100000, opts), capacity_error);
}
