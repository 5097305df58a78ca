#include "divcorr/lemmas.hpp"

#include "divcorr/parallel.hpp"
#include "divcorr/singular.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace divcorr {

double m_of(std::int64_t k)
{
    if (k == 0)
        throw std::domain_error("m_of: k must be nonzero");
    double out = 1.0;
    for (auto p : prime_divisors(k))
        out *= 1.0 + 1.0 / std::sqrt(static_cast<double>(p));
    return out;
}

void MonicPolyPair::validate() const
{
    if (!P1.monic() || !P2.monic())
        throw std::invalid_argument("polynomial pair: both polynomials must be monic");
    if (P2.degree() != P1.degree() + 1)
        throw std::invalid_argument("polynomial pair: deg P2 must equal 1 + deg P1");
    if (P2.degree() > 4)
        throw std::invalid_argument("polynomial pair: degree above 4 is not supported");
}

void MonicPolyPair::check_nonvanishing(std::uint64_t limit) const
{
    const auto primes = primes_up_to(limit);
    for (const auto p : *primes) {
        if (p > limit)
            break;
        if (P2.eval(p) == 0)
            throw std::domain_error("polynomial pair: P2 vanishes at the prime " + std::to_string(p));
    }
}

namespace {

Polynomial parse_poly(const std::string &text)
{
    Polynomial out;
    out.coeffs.clear();
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        std::size_t used = 0;
        const long long c = std::stoll(item, &used);
        if (used != item.size())
            throw std::invalid_argument("polynomial: bad coefficient '" + item + "'");
        out.coeffs.push_back(c);
    }
    if (out.coeffs.empty())
        throw std::invalid_argument("polynomial: no coefficients");
    return out;
}

std::string poly_string(const Polynomial &p)
{
    std::string s;
    for (std::size_t i = 0; i < p.coeffs.size(); ++i) {
        if (i)
            s += ',';
        s += std::to_string(p.coeffs[i]);
    }
    return s;
}

} // namespace

MonicPolyPair MonicPolyPair::parse(const std::string &text)
{
    const auto semi = text.find(';');
    if (semi == std::string::npos)
        throw std::invalid_argument("polynomial pair: expected 'P1;P2'");
    MonicPolyPair out{parse_poly(text.substr(0, semi)), parse_poly(text.substr(semi + 1))};
    out.validate();
    return out;
}

std::string MonicPolyPair::to_string() const { return poly_string(P1) + ';' + poly_string(P2); }

namespace {

/// Arithmetic data of one integer, either read from the tables or from trial division.
struct Arith {
    bool squarefree = true;
    int mu = 1;
    std::int64_t phi = 1;
    std::int64_t d = 1;
    std::vector<std::uint64_t> primes; // distinct, ascending
};

Arith from_tables(std::int64_t n, const ArithTables &t)
{
    const auto u = static_cast<std::uint64_t>(n);
    Arith a;
    a.mu = t.mu(u);
    a.squarefree = a.mu != 0;
    a.phi = t.phi(u);
    a.d = t.num_div(u);
    for (auto p : t.distinct_primes(u))
        a.primes.push_back(p);
    return a;
}

Arith from_trial(std::int64_t n)
{
    Arith a;
    if (n == 1)
        return a;
    for (const auto &pp : factorize(n)) {
        a.primes.push_back(pp.p);
        if (pp.exponent > 1)
            a.squarefree = false;
        std::int64_t pk = 1;
        for (unsigned e = 1; e < pp.exponent; ++e)
            pk *= static_cast<std::int64_t>(pp.p);
        a.phi *= pk * static_cast<std::int64_t>(pp.p - 1);
        a.d *= pp.exponent + 1;
    }
    a.mu = a.squarefree ? (a.primes.size() % 2 ? -1 : 1) : 0;
    return a;
}

std::int64_t phi2_of(const std::vector<std::uint64_t> &primes, std::int64_t m)
{
    std::int64_t out = 1;
    for (auto p : primes)
        if (m % static_cast<std::int64_t>(p) == 0)
            out *= static_cast<std::int64_t>(p) - 2;
    return out;
}

long double lemma3_factor(std::uint64_t p)
{
    const long double x = static_cast<long double>(p);
    return (3.0L * x - 4.0L) / ((x - 1.0L) * (std::sqrt(x) - 1.0L));
}

template <class Info>
double term_impl(LemmaSum which, const LemmaParams &params, std::int64_t n, Info &&info)
{
    if (n < 1)
        return 0.0;
    const Arith a = info(n);
    if (!a.squarefree)
        return 0.0;
    switch (which) {
    case LemmaSum::one: {
        if (std::gcd(n, params.k) != 1)
            return 0.0;
        __int128 num = 1, den = 1;
        for (auto p : a.primes) {
            num *= params.pair.P1.eval(static_cast<std::int64_t>(p));
            den *= params.pair.P2.eval(static_cast<std::int64_t>(p));
        }
        return static_cast<double>(static_cast<long double>(num) / static_cast<long double>(den));
    }
    case LemmaSum::two: {
        const std::int64_t num = a.mu * phi2_of(a.primes, n);
        return static_cast<double>(num) / static_cast<double>(n * a.phi);
    }
    case LemmaSum::three: {
        long double prod = 1.0L;
        for (auto p : a.primes)
            prod *= lemma3_factor(p);
        return static_cast<double>(prod);
    }
    case LemmaSum::four:
    case LemmaSum::four_log: {
        if (std::gcd(n, params.k) != 1)
            return 0.0;
        const auto g = static_cast<std::int64_t>(gcd_u(n, params.j));
        const Arith ag = info(g);
        const std::int64_t num = static_cast<std::int64_t>(a.mu) * ag.mu * ag.phi;
        const double den = static_cast<double>(a.phi) * static_cast<double>(a.phi);
        if (which == LemmaSum::four)
            return static_cast<double>(num) / den;
        return -static_cast<double>(num) * std::log(static_cast<double>(n)) / den;
    }
    case LemmaSum::five: {
        const std::int64_t odd = n % 2 == 0 ? n / 2 : n;
        const auto g = static_cast<std::int64_t>(gcd_u(n, params.J));
        const auto gk = static_cast<std::int64_t>(gcd_u(n, params.k));
        const auto m = static_cast<std::int64_t>(gcd_u(odd, params.J));
        const Arith ag = info(g), ak = info(gk);
        const __int128 num = static_cast<__int128>(a.mu) * a.d * ag.mu * ak.mu * phi2_of(a.primes, m);
        const __int128 den = static_cast<__int128>(a.phi) * phi2_of(a.primes, odd) * ag.d * ak.phi;
        return static_cast<double>(static_cast<long double>(num) / static_cast<long double>(den));
    }
    }
    return 0.0;
}

void check_ladder(const std::vector<std::int64_t> &ladder)
{
    if (ladder.empty())
        throw std::invalid_argument("ladder must not be empty");
    if (ladder.front() < 1)
        throw std::invalid_argument("ladder rungs must be positive");
    for (std::size_t i = 1; i < ladder.size(); ++i)
        if (ladder[i] <= ladder[i - 1])
            throw std::invalid_argument("ladder must be strictly increasing");
}

void check_tables(const std::vector<std::int64_t> &ladder, const ArithTables &tables)
{
    check_ladder(ladder);
    if (static_cast<std::uint64_t>(ladder.back()) > tables.n_max())
        throw std::out_of_range("ladder top " + std::to_string(ladder.back()) + " beyond table range " +
                                std::to_string(tables.n_max()));
}

LemmaReport make_report(std::string name, std::string normalization, const std::vector<std::int64_t> &ladder,
                        LemmaSum which, const LemmaParams &params, const ArithTables &tables)
{
    LemmaReport r;
    r.name = std::move(name);
    r.normalization = std::move(normalization);
    r.x_ladder = ladder;
    r.lhs = ladder_sums(ladder, [&](std::int64_t n) { return lemma_term_sieved(which, params, n, tables); });
    return r;
}

} // namespace

double lemma_term_sieved(LemmaSum which, const LemmaParams &params, std::int64_t n, const ArithTables &tables)
{
    return term_impl(which, params, n, [&](std::int64_t v) { return from_tables(v, tables); });
}

double lemma_term_naive(LemmaSum which, const LemmaParams &params, std::int64_t n)
{
    return term_impl(which, params, n, [](std::int64_t v) { return from_trial(v); });
}

std::vector<double> ladder_sums(const std::vector<std::int64_t> &ladder,
                                const std::function<double(std::int64_t)> &term)
{
    check_ladder(ladder);
    std::vector<double> out;
    CompensatedSum running;
    std::int64_t prev = 0;
    for (auto x : ladder) {
        running += parallel::ordered_sum(prev + 1, x, term);
        out.push_back(running.value());
        prev = x;
    }
    return out;
}

LemmaReport lemma1(const MonicPolyPair &pair, std::int64_t k, const std::vector<std::int64_t> &ladder,
                   const ArithTables &tables)
{
    pair.validate();
    if (k < 1)
        throw std::invalid_argument("lemma1: k must be positive");
    check_tables(ladder, tables);
    pair.check_nonvanishing(static_cast<std::uint64_t>(ladder.back()));
    LemmaParams params;
    params.pair = pair;
    params.k = k;
    auto r = make_report("lemma1", "|lhs - main| * sqrt(x) / m(k)", ladder, LemmaSum::one, params, tables);
    const double mk = m_of(k);
    for (std::size_t i = 0; i < ladder.size(); ++i) {
        const double x = static_cast<double>(ladder[i]);
        r.main.push_back(poly_pair_main_term(pair.P1, pair.P2, static_cast<std::uint64_t>(k), x));
        r.scaled_error.push_back(std::abs(r.lhs[i] - r.main[i]) * std::sqrt(x) / mk);
    }
    const auto c = poly_pair_constants(pair.P1, pair.P2);
    r.extras["euler_product"] = c.euler.value;
    r.extras["euler_tail_bound"] = c.euler.tail_bound;
    r.extras["prime_log_sum"] = c.log_sum.value;
    r.extras["prime_log_sum_tail_bound"] = c.log_sum.tail_bound;
    r.extras["p_cut"] = static_cast<double>(c.euler.p_cut);
    return r;
}

LemmaReport lemma2(const std::vector<std::int64_t> &ladder, const ArithTables &tables)
{
    check_tables(ladder, tables);
    LemmaReport r;
    r.name = "lemma2";
    r.normalization = "|S(x)|";
    r.x_ladder = ladder;
    const LemmaParams params;
    CompensatedSum running;
    double sup = 0.0;
    std::int64_t sup_at = 1;
    std::size_t next = 0;
    for (std::int64_t n = 1; n <= ladder.back(); ++n) {
        running += lemma_term_sieved(LemmaSum::two, params, n, tables);
        const double s = running.value();
        if (std::abs(s) > sup) {
            sup = std::abs(s);
            sup_at = n;
        }
        if (n == ladder[next]) {
            r.lhs.push_back(s);
            r.main.push_back(0.0);
            r.scaled_error.push_back(std::abs(s));
            ++next;
        }
    }
    r.extras["sup_abs"] = sup;
    r.extras["sup_at"] = static_cast<double>(sup_at);
    for (std::size_t i = 1; i < r.lhs.size(); ++i)
        r.extras["cauchy_diff_" + std::to_string(i)] = std::abs(r.lhs[i] - r.lhs[i - 1]);
    return r;
}

TruncatedConstant euler_P1(std::uint64_t p_cut)
{
    if (p_cut < 100)
        throw std::invalid_argument("euler_P1: p_cut must be at least 100");
    static std::mutex lock;
    static std::map<std::uint64_t, TruncatedConstant> memo;
    {
        std::lock_guard guard(lock);
        if (auto it = memo.find(p_cut); it != memo.end())
            return it->second;
    }
    auto f = [](std::uint64_t p) {
        const long double x = static_cast<long double>(p);
        const long double q = 1.0L - 1.0L / x;
        return (1.0L + lemma3_factor(p) * std::sqrt(x) / x) * q * q * q;
    };
    const auto primes = primes_up_to(p_cut);
    long double prod = 1.0L;
    for (const auto p : *primes) {
        if (p > p_cut)
            break;
        prod *= f(p);
    }
    // log f(p) ~ b/p^{3/2}; Σ_{p>P} p^{−3/2} ~ ∫_P^∞ dt/(t^{3/2} log t) = E₁(½ log P).
    const double P = static_cast<double>(p_cut);
    const double half = std::floor(P / 2);
    const double b_top = static_cast<double>(std::log(f(p_cut))) * std::pow(P, 1.5);
    const double b_mid = static_cast<double>(std::log(f(static_cast<std::uint64_t>(half)))) * std::pow(half, 1.5);
    const double K = 2.0 * std::max(std::abs(b_top), std::abs(b_mid));
    TruncatedConstant out;
    out.p_cut = p_cut;
    out.value = static_cast<double>(prod) * std::exp(b_top * -std::expint(-0.5 * std::log(P)));
    out.tail_bound = std::expm1(2.0 * K / std::sqrt(P));
    std::lock_guard guard(lock);
    memo.emplace(p_cut, out);
    return out;
}

LemmaReport lemma3(const std::vector<std::int64_t> &ladder, const ArithTables &tables)
{
    check_tables(ladder, tables);
    auto r = make_report("lemma3", "lhs / (sqrt(x) log^2 x)", ladder, LemmaSum::three, {}, tables);
    const auto p1 = euler_P1();
    for (std::size_t i = 0; i < ladder.size(); ++i) {
        const double x = static_cast<double>(ladder[i]);
        const double scale = std::sqrt(x) * std::log(x) * std::log(x);
        r.main.push_back(p1.value * scale);
        r.scaled_error.push_back(scale > 0 ? r.lhs[i] / scale : std::nan(""));
    }
    r.extras["P1"] = p1.value;
    r.extras["P1_tail_bound"] = p1.tail_bound;
    r.extras["p_cut"] = static_cast<double>(p1.p_cut);
    return r;
}

double lemma4_main(std::int64_t j, std::int64_t k)
{
    if (j == 0 || k == 0)
        throw std::domain_error("lemma4: j and k must be nonzero");
    double brace = 1.0;
    if (k % 2 != 0)
        brace = j % 2 == 0 ? 2.0 : 0.0;
    double out = brace * constant_C(2).value;
    for (auto p : prime_divisors(k))
        if (p > 2) {
            const double x = static_cast<double>(p);
            out *= (x - 1.0) * (x - 1.0) / (x * (x - 2.0));
        }
    for (auto p : prime_divisors(j))
        if (p > 2 && k % static_cast<std::int64_t>(p) != 0) {
            const double x = static_cast<double>(p);
            out *= (x - 1.0) / (x - 2.0);
        }
    return out;
}

LemmaReport lemma4(std::int64_t j, std::int64_t k, const std::vector<std::int64_t> &ladder,
                   const ArithTables &tables)
{
    if (j == 0 || k < 1)
        throw std::invalid_argument("lemma4: need j nonzero and k positive");
    check_tables(ladder, tables);
    LemmaParams params;
    params.j = j;
    params.k = k;
    auto r = make_report("lemma4", "|lhs - main| * x * phi(j') / (d(j') j')", ladder, LemmaSum::four, params,
                         tables);
    const auto jstar = squarefree_kernel(j).value;
    const auto jp = jstar / static_cast<std::int64_t>(gcd_u(jstar, k));
    const double scale = static_cast<double>(totient_naive(static_cast<std::uint64_t>(jp))) /
                         (static_cast<double>(std::int64_t{1} << prime_divisors(jp).size()) * static_cast<double>(jp));
    const double main = lemma4_main(j, k);
    for (std::size_t i = 0; i < ladder.size(); ++i) {
        r.main.push_back(main);
        r.scaled_error.push_back(std::abs(r.lhs[i] - main) * static_cast<double>(ladder[i]) * scale);
    }
    r.extras["j_prime"] = static_cast<double>(jp);
    return r;
}

double lemma4_log_main(std::int64_t j)
{
    if (j == 0)
        throw std::domain_error("lemma4_log: j must be nonzero");
    if (j % 2 != 0) {
        const __int128 twice = static_cast<__int128>(j) * 2;
        return singular_Sn(2, static_cast<std::int64_t>(twice)).value * std::log(2.0) / 2.0;
    }
    static std::once_flag once;
    static double odd_sum = 0.0;
    std::call_once(once, [] {
        odd_sum = prime_log_sum(
                      [](std::uint64_t p) {
                          if (p == 2)
                              return 0.0;
                          const double x = static_cast<double>(p);
                          return std::log(x) / (x * (x - 2.0));
                      },
                      kPrimeSumCut)
                      .value;
    });
    double bracket = odd_sum;
    for (auto p : prime_divisors(j)) {
        const double x = static_cast<double>(p);
        if (p > 2)
            bracket -= std::log(x) / (x * (x - 2.0));
        bracket -= std::log(x) / x;
    }
    return singular_Sn(2, j).value * bracket;
}

LemmaReport lemma4_log(std::int64_t j, const std::vector<std::int64_t> &ladder, const ArithTables &tables)
{
    if (j == 0)
        throw std::invalid_argument("lemma4_log: j must be nonzero");
    check_tables(ladder, tables);
    LemmaParams params;
    params.j = j;
    params.k = 1;
    auto r = make_report("lemma4_log", "|lhs - main| * x * phi(j*) / (j* d(j*) log 2x)", ladder,
                         LemmaSum::four_log, params, tables);
    const auto jstar = squarefree_kernel(j).value;
    const double scale = static_cast<double>(totient_naive(static_cast<std::uint64_t>(jstar))) /
                         (static_cast<double>(jstar) *
                          static_cast<double>(std::int64_t{1} << prime_divisors(jstar).size()));
    const double main = lemma4_log_main(j);
    for (std::size_t i = 0; i < ladder.size(); ++i) {
        const double x = static_cast<double>(ladder[i]);
        r.main.push_back(main);
        r.scaled_error.push_back(std::abs(r.lhs[i] - main) * x * scale / std::log(2.0 * x));
    }
    return r;
}

double lemma5_main(std::int64_t J, std::int64_t k)
{
    if (J == 0 || J % 2 != 0)
        throw std::domain_error("lemma5: J must be even and nonzero");
    if (k < 1 || J % k != 0)
        throw std::domain_error("lemma5: k must be a positive divisor of J");
    if (k % 2 == 0 || J % 3 != 0)
        return 0.0; // [2 ∤ k] = 0, or the p = 3 factor 1 − 2/(2·1) vanishes
    double out = 2.0 * constant_C(3).value;
    for (auto p : prime_divisors(J)) {
        const double x = static_cast<double>(p);
        if (p >= 5)
            out /= 1.0 - 2.0 / ((x - 1.0) * (x - 2.0));
        if (p > 2 && k % static_cast<std::int64_t>(p) != 0)
            out *= 1.0 + 1.0 / (x - 1.0);
    }
    for (auto p : prime_divisors(k))
        if (p > 2) {
            const double x = static_cast<double>(p);
            out *= 1.0 - 1.0 / ((x - 1.0) * (x - 1.0));
        }
    return out;
}

LemmaReport lemma5(std::int64_t J, std::int64_t k, const std::vector<std::int64_t> &ladder,
                   const ArithTables &tables)
{
    const double main = lemma5_main(J, k);
    check_tables(ladder, tables);
    LemmaParams params;
    params.J = J;
    params.k = k;
    auto r = make_report("lemma5", "|lhs - main| * x^0.9", ladder, LemmaSum::five, params, tables);
    for (std::size_t i = 0; i < ladder.size(); ++i) {
        r.main.push_back(main);
        r.scaled_error.push_back(std::abs(r.lhs[i] - main) * std::pow(static_cast<double>(ladder[i]), 0.9));
    }
    return r;
}

MultIdentityResult mult_identity_check(std::int64_t n, const std::function<Rational(std::uint64_t)> &f)
{
    if (n == 0)
        throw std::domain_error("mult_identity_check: n must be nonzero");
    const auto primes = prime_divisors(n);
    MultIdentityResult out;
    std::map<std::uint64_t, Rational> fp;
    for (auto p : primes) {
        fp[p] = f(p);
        out.lhs[p] = 0;
        out.rhs[p] = 0;
    }
    for (auto d : squarefree_divisors(primes)) {
        Rational fd = 1;
        for (auto p : primes)
            if (d % p == 0)
                fd *= fp[p];
        for (auto p : primes)
            if (d % p == 0)
                out.lhs[p] += fd;
    }
    Rational prod = 1;
    for (auto p : primes)
        prod *= 1 + fp[p];
    for (auto p : primes) {
        const Rational denom = 1 + fp[p];
        if (denom == 0)
            throw std::domain_error("mult_identity_check: 1 + f(p) vanishes at p=" + std::to_string(p));
        out.rhs[p] = fp[p] / denom * prod;
    }
    out.exact_equal = true;
    CompensatedSum lv, rv;
    for (auto p : primes) {
        out.lhs[p].canonicalize();
        out.rhs[p].canonicalize();
        if (out.lhs[p] != out.rhs[p])
            out.exact_equal = false;
        const double lp = std::log(static_cast<double>(p));
        lv += to_double(out.lhs[p]) * lp;
        rv += to_double(out.rhs[p]) * lp;
    }
    out.lhs_value = lv.value();
    out.rhs_value = rv.value();
    return out;
}

} // namespace divcorr
