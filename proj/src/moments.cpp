#include "divcorr/moments.hpp"

#include "divcorr/constants.hpp"
#include "divcorr/parallel.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

namespace divcorr {

namespace {

void check_moment_args(std::int64_t N, std::int64_t h, unsigned k)
{
    if (N < 1)
        throw std::invalid_argument("moments: N must be positive");
    if (h < 1)
        throw std::invalid_argument("moments: h must be positive");
    if (k < 1 || k > 20)
        throw std::invalid_argument("moments: k must lie in [1, 20]");
}

void require_limit(std::int64_t need, std::int64_t have, const char *what)
{
    if (need > have)
        throw std::out_of_range(std::string(what) + ": range needs values up to " + std::to_string(need) +
                                ", have " + std::to_string(have));
}

/// Calls visit(𝒋, 𝒂, multinomial) for every 1 <= j_1 < … < j_r <= h and
/// every composition 𝒂 of k into r parts.
void for_each_grouped_term(std::int64_t h, unsigned k,
                           const std::function<void(const ShiftPattern &, std::uint64_t)> &visit)
{
    std::vector<std::uint64_t> fact(k + 1, 1);
    for (unsigned i = 1; i <= k; ++i)
        fact[i] = fact[i - 1] * i;
    for (unsigned r = 1; r <= k && r <= h; ++r) {
        // Compositions of k into r positive parts.
        std::vector<std::vector<unsigned>> comps;
        std::vector<unsigned> cur;
        std::function<void(unsigned, unsigned)> build = [&](unsigned left, unsigned parts) {
            if (parts == 0) {
                if (left == 0)
                    comps.push_back(cur);
                return;
            }
            for (unsigned a = 1; a + (parts - 1) <= left; ++a) {
                cur.push_back(a);
                build(left - a, parts - 1);
                cur.pop_back();
            }
        };
        build(k, r);

        std::vector<std::int64_t> js(r);
        std::function<void(unsigned, std::int64_t)> choose = [&](unsigned idx, std::int64_t start) {
            if (idx == r) {
                for (const auto &a : comps) {
                    std::uint64_t multi = fact[k];
                    for (auto ai : a)
                        multi /= fact[ai];
                    visit(ShiftPattern{js, a}, multi);
                }
                return;
            }
            for (std::int64_t j = start; j <= h; ++j) {
                js[idx] = j;
                choose(idx + 1, j + 1);
            }
        };
        choose(0, 1);
    }
}

double log_n(std::int64_t N) { return std::log(static_cast<double>(N)); }

} // namespace

double moment_psiR_direct(const LambdaSeries &lambda, std::int64_t N, std::int64_t h, unsigned k)
{
    check_moment_args(N, h, k);
    require_limit(N + h, lambda.limit(), "moment_psiR_direct");
    return parallel::ordered_sum(1, N, [&](std::int64_t n) {
        const long double x = lambda.psi_increment(n, n + h);
        long double t = 1.0L;
        for (unsigned i = 0; i < k; ++i)
            t *= x;
        return static_cast<double>(t);
    });
}

Rational moment_psiR_direct(const ExactLambdaSeries &lambda, std::int64_t N, std::int64_t h, unsigned k)
{
    check_moment_args(N, h, k);
    require_limit(N + h, lambda.limit(), "moment_psiR_direct");
    BigInt total = 0, window = 0, term;
    for (std::int64_t m = 1; m <= h; ++m)
        window += lambda.scaled(1 + m);
    for (std::int64_t n = 1; n <= N; ++n) {
        if (n > 1) {
            window += lambda.scaled(n + h);
            window -= lambda.scaled(n);
        }
        mpz_pow_ui(term.get_mpz_t(), window.get_mpz_t(), k);
        total += term;
    }
    BigInt den;
    mpz_pow_ui(den.get_mpz_t(), lambda.denominator().get_mpz_t(), k);
    Rational q(total, den);
    q.canonicalize();
    return q;
}

double expand_via_correlations(const LambdaSeries &lambda, std::int64_t N, std::int64_t h, unsigned k)
{
    check_moment_args(N, h, k);
    CompensatedSum total;
    for_each_grouped_term(h, k, [&](const ShiftPattern &pattern, std::uint64_t multi) {
        total += static_cast<double>(multi) * s_k(N, pattern, lambda).computed;
    });
    return total.value();
}

Rational expand_via_correlations(const ExactLambdaSeries &lambda, std::int64_t N, std::int64_t h, unsigned k)
{
    check_moment_args(N, h, k);
    Rational total = 0;
    for_each_grouped_term(h, k, [&](const ShiftPattern &pattern, std::uint64_t multi) {
        total += Rational(BigInt(static_cast<unsigned long>(multi))) * s_k_exact(N, pattern, lambda);
    });
    total.canonicalize();
    return total;
}

std::optional<double> moment_psiR_prediction(std::int64_t N, std::int64_t h, std::uint64_t R, unsigned k)
{
    const double n = static_cast<double>(N), x = static_cast<double>(h), L = std::log(static_cast<double>(R));
    switch (k) {
    case 1:
        return n * x;
    case 2:
        return n * x * x + n * x * L;
    case 3:
        return n * x * x * x + 3.0 * n * x * x * L + 0.75 * n * x * L * L;
    default:
        return std::nullopt;
    }
}

MomentReport moment_psiR(std::int64_t N, std::int64_t h, std::uint64_t R, unsigned k, bool exact)
{
    check_moment_args(N, h, k);
    MomentReport out;
    out.k = k;
    out.N = N;
    out.h = h;
    out.R = R;
    out.lambda_param = static_cast<double>(h) / log_n(N);
    out.theta = std::log(static_cast<double>(R)) / log_n(N);
    if (exact) {
        const ExactLambdaSeries lambda(R, N + h);
        out.computed_exact = moment_psiR_direct(lambda, N, h, k);
        out.via_exact = expand_via_correlations(lambda, N, h, k);
        out.computed = to_double(*out.computed_exact);
        out.via_correlations = to_double(*out.via_exact);
    } else {
        const LambdaSeries lambda(R, N + h);
        out.computed = moment_psiR_direct(lambda, N, h, k);
        out.via_correlations = expand_via_correlations(lambda, N, h, k);
    }
    out.expansion_residual = out.computed - out.via_correlations;
    if (const auto p = moment_psiR_prediction(N, h, R, k)) {
        out.has_prediction = true;
        out.predicted = *p;
        out.normalized_residual = out.computed / out.predicted - 1.0;
    }
    return out;
}

std::uint64_t stirling2(unsigned k, unsigned r)
{
    if (k < 1 || k > 20 || r < 1 || r > k)
        throw std::out_of_range("stirling2: need 1 <= r <= k <= 20");
    std::vector<std::vector<std::uint64_t>> s(k + 1, std::vector<std::uint64_t>(k + 1, 0));
    s[0][0] = 1;
    for (unsigned n = 1; n <= k; ++n)
        for (unsigned m = 1; m <= n; ++m)
            s[n][m] = m * s[n - 1][m] + s[n - 1][m - 1];
    return s[k][r];
}

MomentReport moment_psi(std::int64_t N, std::int64_t h, unsigned k, const ArithTables &tables, bool centered)
{
    check_moment_args(N, h, k);
    require_limit(N + h, static_cast<std::int64_t>(tables.n_max()), "moment_psi");
    const auto psi = tables.psi_prefix();
    const double shift = centered ? static_cast<double>(h) : 0.0;
    MomentReport out;
    out.k = k;
    out.N = N;
    out.h = h;
    out.centered = centered;
    out.lambda_param = static_cast<double>(h) / log_n(N);
    out.computed = parallel::ordered_sum(1, N, [&](std::int64_t n) {
        const double y = psi[static_cast<std::size_t>(n + h)] - psi[static_cast<std::size_t>(n)] - shift;
        double t = 1.0;
        for (unsigned i = 0; i < k; ++i)
            t *= y;
        return t;
    });
    out.via_correlations = std::numeric_limits<double>::quiet_NaN();
    const double n = static_cast<double>(N), L = log_n(N);
    if (!centered) {
        double s = 0.0;
        for (unsigned r = 1; r <= k; ++r)
            s += static_cast<double>(stirling2(k, r)) * std::pow(out.lambda_param, r);
        out.predicted = n * std::pow(L, k) * s;
        out.has_prediction = true;
    } else if (k % 2 == 0) {
        double dfact = 1.0;
        for (unsigned i = k - 1; i >= 1 && i <= k; i -= 2)
            dfact *= i;
        out.predicted = dfact * n * std::pow(static_cast<double>(h) * std::log(n / static_cast<double>(h)), k / 2.0);
        out.has_prediction = true;
    }
    if (out.has_prediction)
        out.normalized_residual = out.computed / out.predicted - 1.0;
    return out;
}

FirstMomentIdentity first_moment_identity(std::int64_t N, std::int64_t h, const ArithTables &tables)
{
    if (h < 1 || h > N)
        throw std::invalid_argument("first_moment_identity: need 1 <= h <= N");
    require_limit(N + h, static_cast<std::int64_t>(tables.n_max()), "first_moment_identity");
    const auto top = static_cast<std::size_t>(N + h);

    std::vector<std::int64_t> direct(top + 1, 0);
    for (std::int64_t n = 1; n <= N; ++n)
        for (std::int64_t m = n + 1; m <= n + h; ++m)
            ++direct[static_cast<std::size_t>(m)];

    auto split_weight = [&](std::int64_t m) -> std::int64_t {
        if (m <= h)
            return m - 1;
        if (m <= N)
            return h;
        return N + h - m + 1;
    };

    FirstMomentIdentity out;
    for (std::int64_t m = 2; m <= N + h; ++m) {
        const auto pp = tables.prime_power(static_cast<std::uint64_t>(m));
        if (!pp)
            continue;
        out.direct.add_log_prime(pp->p, direct[static_cast<std::size_t>(m)]);
        out.split.add_log_prime(pp->p, split_weight(m));
    }
    out.exact_equal = out.direct == out.split;
    out.direct_value = out.direct.value();

    // ∫_a^b ψ(t) dt = Σ_{a≤m<b} ψ(m) for integers a < b.
    auto integral = [&](std::int64_t a, std::int64_t b) {
        CompensatedSum s;
        for (std::int64_t m = a; m < b; ++m)
            s += tables.psi(m);
        return s.value();
    };
    CompensatedSum form;
    form += tables.psi(N + h);
    form += -tables.psi(N);
    form += -tables.psi(h);
    form += -(h >= 2 ? integral(2, h) : 0.0);
    form += integral(N, N + h);
    out.psi_form = form.value();
    out.psi_form_residual = out.psi_form - out.direct_value;
    return out;
}

namespace {

std::optional<double> mixed_prediction(std::int64_t N, std::int64_t h, std::uint64_t R, unsigned k)
{
    const double n = static_cast<double>(N), x = static_cast<double>(h), L = std::log(static_cast<double>(R));
    switch (k) {
    case 1:
        return n * x;
    case 2:
        return n * x * x + n * x * L;
    case 3:
        return n * x * x * x + 3.0 * n * x * x * L + n * x * L * L;
    default:
        return std::nullopt;
    }
}

} // namespace

MomentReport mixed_moment(const LambdaSeries &lambda, std::int64_t N, std::int64_t h, unsigned k,
                          const ArithTables &tables, bool primed)
{
    check_moment_args(N, h, k);
    if (k > 3)
        throw std::invalid_argument("mixed_moment: k must be 1, 2 or 3");
    const auto [lo, hi] = correlation_range(N, primed);
    require_limit(hi + h, lambda.limit(), "mixed_moment");
    require_limit(hi + h, static_cast<std::int64_t>(tables.n_max()), "mixed_moment");
    if (lambda.R() > tables.n_max())
        throw std::out_of_range("mixed_moment: R beyond table range");
    const double L1 = script_L_value(lambda.R(), 1, tables);
    const auto big = tables.lambda_values();

    const auto sums = parallel::ordered_sums(lo, hi, 2, [&](std::int64_t n, double *out) {
        long double s1 = 0, s2 = 0, t = 0, u1 = 0, u2 = 0;
        for (std::int64_t j = 1; j <= h; ++j) {
            const long double l = lambda(n + j);
            const long double v = big[static_cast<std::size_t>(n + j)];
            s1 += l;
            s2 += l * l;
            t += v;
            u1 += l * v;
            u2 += l * l * v;
        }
        long double direct = t, expansion = t;
        if (k == 2) {
            direct = s1 * t;
            expansion = L1 * t + (s1 * t - u1);
        } else if (k == 3) {
            direct = s1 * s1 * t;
            expansion = L1 * L1 * t + (s2 * t - u2) + 2.0L * L1 * (s1 * t - u1) +
                        (t * (s1 * s1 - s2) - 2.0L * s1 * u1 + 2.0L * u2);
        }
        out[0] = static_cast<double>(direct);
        out[1] = static_cast<double>(expansion);
    });

    MomentReport out;
    out.k = k;
    out.N = N;
    out.h = h;
    out.R = lambda.R();
    out.mixed = true;
    out.computed = sums[0];
    out.via_correlations = sums[1];
    out.expansion_residual = out.computed - out.via_correlations;
    out.lambda_param = static_cast<double>(h) / log_n(N);
    out.theta = std::log(static_cast<double>(lambda.R())) / log_n(N);
    if (const auto p = mixed_prediction(N, h, lambda.R(), k)) {
        out.has_prediction = true;
        out.predicted = *p;
        out.normalized_residual = out.computed / out.predicted - 1.0;
    }
    return out;
}

MomentReport mixed_moment(std::int64_t N, std::int64_t h, std::uint64_t R, unsigned k, const ArithTables &tables,
                          bool primed)
{
    const auto hi = correlation_range(N, primed).second;
    const LambdaSeries lambda(R, hi + h);
    return mixed_moment(lambda, N, h, k, tables, primed);
}

double mixed_expansion_literal(const LambdaSeries &lambda, std::int64_t N, std::int64_t h, unsigned k,
                               const ArithTables &tables, bool primed)
{
    check_moment_args(N, h, k);
    if (k > 3)
        throw std::invalid_argument("mixed_expansion_literal: k must be 1, 2 or 3");
    const double L1 = script_L_value(lambda.R(), 1, tables);
    auto tilde = [&](std::vector<std::int64_t> js, std::vector<unsigned> as) {
        return s_tilde_k(N, ShiftPattern{std::move(js), std::move(as)}, lambda, tables, primed).computed;
    };
    CompensatedSum singles, pairs11, pairs21, triples;
    for (std::int64_t a = 1; a <= h; ++a) {
        singles += tilde({a}, {1});
        for (std::int64_t b = 1; b <= h; ++b) {
            if (b == a)
                continue;
            if (k >= 2)
                pairs11 += tilde({a, b}, {1, 1});
            if (k == 3) {
                pairs21 += tilde({a, b}, {2, 1});
                for (std::int64_t c = 1; c <= h; ++c)
                    if (c != a && c != b)
                        triples += tilde({a, b, c}, {1, 1, 1});
            }
        }
    }
    switch (k) {
    case 1:
        return singles.value();
    case 2:
        return L1 * singles.value() + pairs11.value();
    default:
        return L1 * L1 * singles.value() + pairs21.value() + 2.0 * L1 * pairs11.value() + triples.value();
    }
}

double omega_preset_C(std::int64_t N, std::int64_t h, std::uint64_t R, double rho)
{
    if (rho == 0.0)
        throw std::invalid_argument("omega preset: rho must be nonzero");
    const double L = log_n(N);
    const double theta = std::log(static_cast<double>(R)) / L;
    const double alpha = std::log(static_cast<double>(h)) / L;
    return -(theta - alpha) / rho;
}

OmegaExperiment omega_experiment(std::int64_t N, std::int64_t h, std::uint64_t R, double rho, double C,
                                 const ArithTables &tables)
{
    check_moment_args(N, h, 1);
    OmegaExperiment out;
    out.N = N;
    out.h = h;
    out.R = R;
    out.rho = rho;
    out.C = C;
    const double L = log_n(N);
    out.A = std::sqrt(static_cast<double>(h) * L);
    if (!(out.A < static_cast<double>(h)))
        throw std::invalid_argument("omega_experiment: A = (h log N)^{1/2} must be below h");
    const std::int64_t top = 2 * N + h;
    require_limit(top, static_cast<std::int64_t>(tables.n_max()), "omega_experiment");
    out.theta = std::log(static_cast<double>(R)) / L;
    out.alpha = std::log(static_cast<double>(h)) / L;
    out.in_proven_regime = static_cast<double>(h) >= std::pow(L, 14);

    const LambdaSeries lambda(R, top);
    const auto psi = tables.psi_prefix();
    const long double a = static_cast<long double>(h) + static_cast<long double>(C) * out.A;
    const long double b = static_cast<long double>(h) + static_cast<long double>(rho) * out.A;

    // 0..2 direct ℳ′_1..3; 3..7 Σy, Σx, Σx², Σxy, Σx²y.
    const auto s = parallel::ordered_sums(N + 1, 2 * N, 8, [&](std::int64_t n, double *o) {
        const long double x = lambda.psi_increment(n, n + h);
        const long double y = static_cast<long double>(psi[static_cast<std::size_t>(n + h)]) -
                              static_cast<long double>(psi[static_cast<std::size_t>(n)]);
        o[0] = static_cast<double>(y - b);
        o[1] = static_cast<double>((x - a) * (y - b));
        o[2] = static_cast<double>((x - a) * (x - a) * (y - b));
        o[3] = static_cast<double>(y);
        o[4] = static_cast<double>(x);
        o[5] = static_cast<double>(x * x);
        o[6] = static_cast<double>(x * y);
        o[7] = static_cast<double>(x * x * y);
    });
    out.m1 = s[0];
    out.m2 = s[1];
    out.m3 = s[2];
    const long double n = static_cast<long double>(N);
    const long double M1psi = s[3], M1R = s[4], M2R = s[5], Mt2 = s[6], Mt3 = s[7];
    out.m1_expanded = static_cast<double>(M1psi - b * n);
    out.m2_expanded = static_cast<double>(Mt2 - b * M1R - a * M1psi + a * b * n);
    out.m3_expanded =
        static_cast<double>(Mt3 - b * M2R - 2.0L * a * Mt2 + 2.0L * a * b * M1R + a * a * M1psi - a * a * b * n);

    const double logRh = std::log(static_cast<double>(R) / static_cast<double>(h));
    out.predicted_m2 = static_cast<double>(N) * static_cast<double>(h) * (rho * C * L + logRh);
    out.predicted_m3 = -static_cast<double>(N) * std::pow(static_cast<double>(h), 1.5) * std::sqrt(L) *
                       (rho * C * C * L + (2.0 * C + rho) * logRh);
    return out;
}

} // namespace divcorr
