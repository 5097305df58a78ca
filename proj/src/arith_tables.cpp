#include "divcorr/arith_tables.hpp"

#include <bit>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <numeric>
#include <string>

namespace divcorr {

static_assert(std::endian::native == std::endian::little,
              "table cache I/O assumes a little-endian host");

namespace {

constexpr char kMagic[4] = {'D', 'C', 'T', 'B'};

void check_index(std::uint64_t n, std::uint64_t n_max, const char *what)
{
    if (n > n_max)
        throw std::out_of_range(std::string(what) + ": argument exceeds table range");
}

template <class T>
void write_array(std::ofstream &out, const std::vector<T> &v)
{
    out.write(reinterpret_cast<const char *>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(T)));
}

template <class T>
void read_array(std::ifstream &in, std::vector<T> &v, std::size_t count)
{
    v.resize(count);
    in.read(reinterpret_cast<char *>(v.data()), static_cast<std::streamsize>(count * sizeof(T)));
    if (!in)
        throw std::runtime_error("table cache truncated");
}

} // namespace

ArithTables build_tables(std::uint64_t n_max, const TableOptions &options)
{
    if (n_max < 2)
        throw std::invalid_argument("build_tables: n_max must be at least 2");
    if (n_max >= std::numeric_limits<std::uint32_t>::max())
        throw capacity_error("build_tables: n_max must stay below 2^32");
    const std::size_t need = (n_max + 1) * (kTableBytesPerEntry + 1);
    if (need > options.memory_budget_bytes)
        throw capacity_error("build_tables: n_max=" + std::to_string(n_max) + " needs about " +
                             std::to_string(need >> 20) + " MiB, over the configured budget");

    ArithTables t;
    t.n_max_ = n_max;
    const std::size_t size = n_max + 1;
    t.spf_.assign(size, 0);
    t.mu_.assign(size, 0);
    t.phi_.assign(size, 0);
    t.num_div_.assign(size, 0);
    // exponent of the smallest prime in n; only needed while sieving
    std::vector<std::uint8_t> spf_exp(size, 0);

    t.mu_[1] = 1;
    t.phi_[1] = 1;
    t.num_div_[1] = 1;
    auto &primes = t.primes_;
    for (std::uint64_t i = 2; i <= n_max; ++i) {
        if (t.spf_[i] == 0) {
            t.spf_[i] = static_cast<std::uint32_t>(i);
            t.mu_[i] = -1;
            t.phi_[i] = static_cast<std::uint32_t>(i - 1);
            t.num_div_[i] = 2;
            spf_exp[i] = 1;
            primes.push_back(static_cast<std::uint32_t>(i));
        }
        for (const std::uint32_t p : primes) {
            const std::uint64_t m = i * p;
            if (p > t.spf_[i] || m > n_max)
                break;
            t.spf_[m] = p;
            if (p == t.spf_[i]) {
                t.mu_[m] = 0;
                t.phi_[m] = t.phi_[i] * p;
                spf_exp[m] = static_cast<std::uint8_t>(spf_exp[i] + 1);
                t.num_div_[m] = static_cast<std::uint16_t>(t.num_div_[i] / (spf_exp[i] + 1) * (spf_exp[i] + 2));
            } else {
                t.mu_[m] = static_cast<std::int8_t>(-t.mu_[i]);
                t.phi_[m] = t.phi_[i] * (p - 1);
                spf_exp[m] = 1;
                t.num_div_[m] = static_cast<std::uint16_t>(t.num_div_[i] * 2);
            }
        }
    }
    t.finish_derived();
    return t;
}

void ArithTables::finish_derived()
{
    const std::size_t size = n_max_ + 1;
    if (primes_.empty())
        for (std::uint64_t i = 2; i <= n_max_; ++i)
            if (spf_[i] == i)
                primes_.push_back(static_cast<std::uint32_t>(i));
    lambda_.assign(size, 0.0);
    // prime-power flag propagates from n / spf(n)
    std::vector<std::uint8_t> is_pp(size, 0);
    for (std::uint64_t n = 2; n <= n_max_; ++n) {
        const std::uint64_t p = spf_[n];
        const std::uint64_t rest = n / p;
        if (rest == 1 || (spf_[rest] == p && is_pp[rest])) {
            is_pp[n] = 1;
            lambda_[n] = std::log(static_cast<double>(p));
        }
    }
    psi_prefix_.assign(size, 0.0);
    CompensatedSum running;
    for (std::uint64_t n = 1; n <= n_max_; ++n) {
        running += lambda_[n];
        psi_prefix_[n] = running.value();
    }
}

double ArithTables::psi(std::int64_t x) const
{
    if (x <= 0)
        return 0.0;
    check_index(static_cast<std::uint64_t>(x), n_max_, "psi");
    return psi_prefix_[static_cast<std::size_t>(x)];
}

std::optional<PrimePower> ArithTables::prime_power(std::uint64_t n) const
{
    check_index(n, n_max_, "prime_power");
    if (n < 2 || lambda_[n] == 0.0)
        return std::nullopt;
    const std::uint64_t p = spf_[n];
    PrimePower pp{p, 0};
    for (std::uint64_t m = n; m > 1; m /= p)
        ++pp.exponent;
    return pp;
}

std::vector<PrimePower> ArithTables::factor(std::uint64_t n) const
{
    check_index(n, n_max_, "factor");
    std::vector<PrimePower> out;
    while (n > 1) {
        const std::uint32_t p = spf_[n];
        PrimePower pp{p, 0};
        while (n % p == 0) {
            n /= p;
            ++pp.exponent;
        }
        out.push_back(pp);
    }
    return out;
}

std::vector<std::uint32_t> ArithTables::distinct_primes(std::uint64_t n) const
{
    check_index(n, n_max_, "distinct_primes");
    std::vector<std::uint32_t> out;
    while (n > 1) {
        const std::uint32_t p = spf_[n];
        out.push_back(p);
        while (n % p == 0)
            n /= p;
    }
    return out;
}

std::uint64_t ArithTables::sigma(std::uint64_t n) const
{
    if (n == 0)
        throw std::domain_error("sigma: n must be positive");
    std::uint64_t s = 1;
    for (const auto &pp : factor(n)) {
        std::uint64_t term = 1, pk = 1;
        for (unsigned e = 0; e < pp.exponent; ++e) {
            pk *= pp.p;
            term += pk;
        }
        s *= term;
    }
    return s;
}

void save_tables(const ArithTables &tables, const std::filesystem::path &path)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw std::runtime_error("cannot write table cache " + path.string());
    out.write(kMagic, 4);
    const std::uint32_t version = kTableCacheVersion;
    const std::uint64_t n_max = tables.n_max_;
    out.write(reinterpret_cast<const char *>(&version), sizeof version);
    out.write(reinterpret_cast<const char *>(&n_max), sizeof n_max);
    write_array(out, tables.spf_);
    write_array(out, tables.mu_);
    write_array(out, tables.phi_);
    write_array(out, tables.num_div_);
    if (!out)
        throw std::runtime_error("failed writing table cache " + path.string());
}

ArithTables load_tables(const std::filesystem::path &path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open table cache " + path.string());
    char magic[4];
    std::uint32_t version = 0;
    std::uint64_t n_max = 0;
    in.read(magic, 4);
    in.read(reinterpret_cast<char *>(&version), sizeof version);
    in.read(reinterpret_cast<char *>(&n_max), sizeof n_max);
    if (!in || !std::equal(magic, magic + 4, kMagic))
        throw std::runtime_error("not a table cache: " + path.string());
    if (version != kTableCacheVersion)
        throw std::runtime_error("stale table cache version " + std::to_string(version));
    ArithTables t;
    t.n_max_ = n_max;
    const std::size_t size = n_max + 1;
    read_array(in, t.spf_, size);
    read_array(in, t.mu_, size);
    read_array(in, t.phi_, size);
    read_array(in, t.num_div_, size);
    t.finish_derived();
    return t;
}

ArithTables cached_tables(std::uint64_t n_max, const TableOptions &options)
{
    const char *dir = std::getenv("DIVCORR_CACHE_DIR");
    if (dir == nullptr || *dir == '\0')
        return build_tables(n_max, options);
    const auto path = std::filesystem::path(dir) /
                      ("tables_v" + std::to_string(kTableCacheVersion) + "_" + std::to_string(n_max) + ".bin");
    if (std::filesystem::exists(path)) {
        try {
            return load_tables(path);
        } catch (const std::runtime_error &) {
            // stale or corrupt: rebuild below
        }
    }
    auto t = build_tables(n_max, options);
    std::filesystem::create_directories(path.parent_path());
    save_tables(t, path);
    return t;
}

std::int64_t phi2(std::int64_t n)
{
    if (n <= 0)
        throw std::domain_error("phi2: argument must be a positive squarefree integer");
    std::int64_t out = 1;
    for (const auto &pp : factorize(n)) {
        if (pp.exponent > 1)
            throw std::domain_error("phi2: argument must be squarefree");
        out *= static_cast<std::int64_t>(pp.p) - 2;
    }
    return out;
}

SquarefreeKernel squarefree_kernel(std::int64_t j)
{
    if (j == 0)
        throw std::domain_error("squarefree_kernel: j must be nonzero");
    SquarefreeKernel k{1, j};
    for (auto p : prime_divisors(j))
        k.value *= p;
    return k;
}

double psi_ap(std::int64_t x, std::uint64_t q, std::int64_t a, const ArithTables &tables)
{
    if (q == 0)
        throw std::invalid_argument("psi_ap: modulus must be positive");
    if (x < 1)
        return 0.0;
    check_index(static_cast<std::uint64_t>(x), tables.n_max(), "psi_ap");
    const auto qi = static_cast<std::int64_t>(q);
    std::int64_t start = ((a % qi) + qi) % qi;
    if (start == 0)
        start = qi;
    const auto lam = tables.lambda_values();
    CompensatedSum s;
    for (std::int64_t n = start; n <= x; n += qi)
        s += lam[static_cast<std::size_t>(n)];
    return s.value();
}

double error_in_ap(std::int64_t x, std::uint64_t q, std::int64_t a, const ArithTables &tables)
{
    const double main = gcd_u(a, static_cast<std::int64_t>(q)) == 1
                            ? static_cast<double>(x) / static_cast<double>(totient_naive(q))
                            : 0.0;
    return psi_ap(x, q, a, tables) - main;
}

double bv_sum(std::int64_t x, std::uint64_t Q, const ArithTables &tables)
{
    if (x < 1)
        throw std::invalid_argument("bv_sum: x must be positive");
    check_index(static_cast<std::uint64_t>(x), tables.n_max(), "bv_sum");
    const auto lam = tables.lambda_values();
    std::vector<std::int64_t> support;
    for (std::int64_t n = 2; n <= x; ++n)
        if (lam[static_cast<std::size_t>(n)] != 0.0)
            support.push_back(n);
    CompensatedSum total;
    for (std::uint64_t q = 1; q <= Q; ++q) {
        std::vector<CompensatedSum> by_class(q);
        for (const auto n : support)
            by_class[static_cast<std::uint64_t>(n) % q] += lam[static_cast<std::size_t>(n)];
        const double main = static_cast<double>(x) / static_cast<double>(totient_naive(q));
        double worst = 0.0;
        for (std::uint64_t a = 0; a < q; ++a) {
            if (std::gcd(a, q) != 1)
                continue;
            worst = std::max(worst, std::abs(by_class[a].value() - main));
        }
        total += worst;
    }
    return total.value();
}

} // namespace divcorr
