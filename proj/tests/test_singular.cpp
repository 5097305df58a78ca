#include <doctest.h>

#include "divcorr/singular.hpp"

#include <cmath>
#include <vector>

using namespace divcorr;

namespace {

std::vector<std::uint64_t> small_primes(std::uint64_t limit)
{
    std::vector<bool> composite(limit + 1, false);
    std::vector<std::uint64_t> out;
    for (std::uint64_t p = 2; p <= limit; ++p) {
        if (composite[p])
            continue;
        out.push_back(p);
        for (std::uint64_t q = p * p; q <= limit; q += p)
            composite[q] = true;
    }
    return out;
}

// Π_p (1 − 1/p)^{−r}(1 − ν_p/p) straight from the residue count, primes <= limit.
double singular_oracle(const std::vector<std::int64_t> &shifts, std::uint64_t limit)
{
    const double r = static_cast<double>(shifts.size());
    long double prod = 1.0L;
    for (auto p : small_primes(limit)) {
        std::vector<bool> hit(p, false);
        std::uint64_t nu = 0;
        for (auto j : shifts) {
            const auto res = static_cast<std::uint64_t>(((j % static_cast<std::int64_t>(p)) + p) % p);
            if (!hit[res]) {
                hit[res] = true;
                ++nu;
            }
        }
        const long double x = static_cast<long double>(p);
        prod *= std::pow(x / (x - 1), r) * (1 - static_cast<long double>(nu) / x);
    }
    return static_cast<double>(prod);
}

const double kTwinC2 = 0.66016181584686957;

} // namespace

TEST_CASE("shift patterns")
{
    const auto p = ShiftPattern::parse("0:1,2:1");
    CHECK(p.shifts == std::vector<std::int64_t>{0, 2});
    CHECK(p.k() == 2);
    const auto q = ShiftPattern::parse("0,2,6");
    CHECK(q.r() == 3);
    CHECK(q.multiplicities == std::vector<unsigned>{1, 1, 1});
    CHECK(ShiftPattern::parse(q.to_string()).shifts == q.shifts);
    CHECK_THROWS(ShiftPattern::parse("0:0"));
    CHECK_THROWS(ShiftPattern::parse("a"));
    CHECK_THROWS(ShiftPattern::parse(""));
}

TEST_CASE("twin prime constant")
{
    const auto c2 = constant_C(2);
    CHECK(c2.value == doctest::Approx(kTwinC2).epsilon(1e-10));
    CHECK(singular_Sn(2, 2).value == doctest::Approx(2 * kTwinC2).epsilon(1e-10));
    CHECK(singular_Sn(2, 1).vanishes);
    CHECK(singular_Sn(2, 1).value == 0.0);
    CHECK(singular_Sn(2, 6).value == doctest::Approx(4 * kTwinC2).epsilon(1e-10));
    CHECK_THROWS_AS(singular_Sn(2, 0), std::domain_error);
    CHECK_THROWS_AS(singular_Sn(4, 2), std::domain_error);
}

TEST_CASE("C_3 against a direct product")
{
    long double prod = 1.0L;
    for (auto p : small_primes(2000000))
        if (p >= 5) {
            const long double x = static_cast<long double>(p);
            prod *= 1 - 2 / ((x - 1) * (x - 2));
        }
    const auto c3 = constant_C(3);
    CHECK(c3.value == doctest::Approx(static_cast<double>(prod)).epsilon(2e-6));
}

TEST_CASE("singular_vector against the residue-count oracle")
{
    const std::vector<std::vector<std::int64_t>> cases = {
        {0}, {5}, {0, 2}, {0, 4}, {0, 6}, {0, 30}, {0, 2, 6}, {0, 4, 6}, {0, 2, 8}, {0, 6, 12, 18}, {-3, 5, 11}};
    for (const auto &c : cases) {
        const auto v = singular_vector(c, 100000);
        CHECK(v.value == doctest::Approx(singular_oracle(c, 100000)).epsilon(5e-5));
    }
    CHECK(singular_vector(std::vector<std::int64_t>{0, 2, 6}).value ==
          doctest::Approx(2.8582485957).epsilon(1e-9));
}

TEST_CASE("singleton and vanishing tuples")
{
    for (std::int64_t j : {-7, 0, 1, 12})
        CHECK(singular_vector(std::vector<std::int64_t>{j}).value == 1.0);
    CHECK(singular_vector(std::vector<std::int64_t>{0, 1}).vanishes);
    CHECK(singular_vector(std::vector<std::int64_t>{0, 2, 4}).value == 0.0);
    CHECK_THROWS(singular_vector(std::vector<std::int64_t>{0, 0}));
}

TEST_CASE("translation and permutation invariance")
{
    const std::vector<std::int64_t> base = {0, 2, 6, 8};
    const double v = singular_vector(base).value;
    for (std::int64_t t : {-9, 1, 17, 1000}) {
        std::vector<std::int64_t> moved;
        for (auto j : base)
            moved.push_back(j + t);
        CHECK(singular_vector(moved).value == doctest::Approx(v).epsilon(1e-14));
    }
    CHECK(singular_vector(std::vector<std::int64_t>{8, 0, 6, 2}).value == doctest::Approx(v).epsilon(1e-14));
}

TEST_CASE("pair series agree with S_2 of the difference")
{
    for (std::int64_t d = 1; d <= 60; ++d)
        CHECK(singular_vector(std::vector<std::int64_t>{0, d}).value ==
              doctest::Approx(singular_Sn(2, d).value).epsilon(1e-12));
    const auto range = singular_S2_range(500);
    for (std::int64_t d = 1; d <= 500; ++d)
        REQUIRE(range[static_cast<std::size_t>(d)] == doctest::Approx(singular_Sn(2, d).value).epsilon(1e-12));
}

TEST_CASE("product identity")
{
    const auto a = product_identity_check(2, 6);
    CHECK(std::abs(a.residual) <= 1e-8);
    CHECK(a.lhs == doctest::Approx(singular_vector(std::vector<std::int64_t>{0, 2, 6}).value));
    const auto b = product_identity_check(1, 2);
    CHECK(b.lhs == 0.0);
    CHECK(b.rhs == 0.0);
    CHECK(std::abs(product_identity_check(2, 4).residual) <= 1e-8);
    for (std::int64_t j1 = -12; j1 <= 12; ++j1)
        for (std::int64_t j2 = -12; j2 <= 12; ++j2)
            if (j1 != 0 && j2 != 0 && j1 != j2) {
                const auto r = product_identity_check(j1, j2);
                REQUIRE(std::abs(r.residual) <= std::max(1e-8, r.bound));
            }
}

TEST_CASE("U transform inverts to S")
{
    CHECK(u_transform(std::vector<std::int64_t>{4}) == 0.0);
    CHECK(u_transform(std::vector<std::int64_t>{0, 2}) ==
          doctest::Approx(singular_vector(std::vector<std::int64_t>{0, 2}).value - 1));
    // Alternating sum over the 8 subsets of (0, 1, 2).
    auto S = [](std::vector<std::int64_t> v) { return singular_vector(v).value; };
    const double oracle = S({0, 1, 2}) - S({0, 1}) - S({0, 2}) - S({1, 2}) + S({0}) + S({1}) + S({2}) - 1.0;
    CHECK(u_transform(std::vector<std::int64_t>{0, 1, 2}) == doctest::Approx(oracle));
    // S = Σ over subsets of U.
    const std::vector<std::int64_t> j = {0, 2, 6, 8};
    double total = 0.0;
    for (unsigned mask = 0; mask < 16; ++mask) {
        std::vector<std::int64_t> sub;
        for (unsigned i = 0; i < 4; ++i)
            if (mask & (1u << i))
                sub.push_back(j[i]);
        total += sub.empty() ? 1.0 : u_transform(sub);
    }
    CHECK(total == doctest::Approx(S(j)).epsilon(1e-12));
}

TEST_CASE("weighted S_2 sum")
{
    CHECK(weighted_S2_sum(2).sum == 0.0);
    const auto w = weighted_S2_sum(1000);
    double oracle = 0.0;
    for (std::int64_t j = 1; j < 1000; ++j)
        oracle += static_cast<double>(1000 - j) * singular_Sn(2, j).value;
    CHECK(w.sum == doctest::Approx(oracle).epsilon(1e-11));
    CHECK(std::abs(w.sum - w.main) <= std::pow(1000.0, 0.6));
}

TEST_CASE("tuple sums")
{
    for (std::int64_t h = 2; h <= 500; ++h)
        REQUIRE(big_R(1, h) == 0.0);
    CHECK(gallagher_sum(1, 37) == 37.0);

    const std::int64_t h = 1000;
    double pair = 0.0;
    for (std::int64_t d = 1; d < h; ++d)
        pair += 2.0 * static_cast<double>(h - d) * singular_Sn(2, d).value;
    CHECK(gallagher_sum(2, h) == doctest::Approx(pair).epsilon(1e-11));
    CHECK(std::abs(gallagher_sum(2, h) - static_cast<double>(h * h)) <= 2.0 * h * std::log(h));
    CHECK(big_R(2, h) == doctest::Approx(pair - static_cast<double>(h * (h - 1))).epsilon(1e-9));
    CHECK(gallagher_from_R(2, h) == doctest::Approx(gallagher_sum(2, h)).epsilon(1e-12));
}

TEST_CASE("triple sums against brute force")
{
    const std::int64_t h = 14;
    double r3 = 0.0, g3 = 0.0;
    for (std::int64_t a = 1; a <= h; ++a)
        for (std::int64_t b = a + 1; b <= h; ++b)
            for (std::int64_t c = b + 1; c <= h; ++c) {
                const std::vector<std::int64_t> t = {a, b, c};
                r3 += 6.0 * u_transform(t);
                g3 += 6.0 * singular_vector(t).value;
            }
    CHECK(big_R(3, h) == doctest::Approx(r3).epsilon(1e-10));
    CHECK(gallagher_sum(3, h) == doctest::Approx(g3).epsilon(1e-10));
    CHECK(gallagher_from_R(3, h) == doctest::Approx(g3).epsilon(1e-10));
    const double ratio = gallagher_sum(3, 300) / std::pow(300.0, 3);
    CHECK(std::abs(ratio - 1.0) <= 0.10);
}

TEST_CASE("truncation bounds cover the change in p_cut")
{
    const std::vector<std::int64_t> t = {0, 2, 6};
    const auto coarse = singular_vector(t, 1000);
    const auto fine = singular_vector(t, 1000000);
    CHECK(std::abs(coarse.value - fine.value) <= coarse.tail_bound * coarse.value);
    CHECK(fine.tail_bound < coarse.tail_bound);
    CHECK_THROWS_AS(singular_vector(t, 50), std::invalid_argument);
}
